use super::{AdapterError, Embedder, EmbedderInfo};

/// Decodes every vector to the same sentence.
#[derive(Debug, Clone)]
pub struct ConstantEmbedder {
    pub dims: usize,
    pub sentence: Vec<String>,
}

impl Embedder for ConstantEmbedder {
    fn info(&self) -> EmbedderInfo {
        EmbedderInfo {
            name: "constant".into(),
            dims: self.dims,
            encode: true,
            decode: true,
        }
    }

    fn encode(&mut self, _tokens: &[String]) -> Result<Vec<f64>, AdapterError> {
        Ok(vec![0.5; self.dims])
    }

    fn decode(&mut self, _vector: &[f64]) -> Result<Vec<String>, AdapterError> {
        Ok(self.sentence.clone())
    }
}

/// Decodes to a fixed script of sentences, cycling when it runs out.
#[derive(Debug, Clone)]
pub struct ScriptedEmbedder {
    pub dims: usize,
    pub script: Vec<Vec<String>>,
    next: usize,
}

impl ScriptedEmbedder {
    pub fn new(dims: usize, script: Vec<Vec<String>>) -> Self {
        assert!(!script.is_empty(), "empty script");
        ScriptedEmbedder { dims, script, next: 0 }
    }
}

impl Embedder for ScriptedEmbedder {
    fn info(&self) -> EmbedderInfo {
        EmbedderInfo {
            name: "scripted".into(),
            dims: self.dims,
            encode: false,
            decode: true,
        }
    }

    fn encode(&mut self, _tokens: &[String]) -> Result<Vec<f64>, AdapterError> {
        Err(AdapterError::Unsupported("encode"))
    }

    fn decode(&mut self, _vector: &[f64]) -> Result<Vec<String>, AdapterError> {
        let s = self.script[self.next % self.script.len()].clone();
        self.next += 1;
        Ok(s)
    }
}
