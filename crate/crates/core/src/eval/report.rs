//! Text renderings of evaluation reports.

use std::fmt::Write;

use super::{GeneralizationReport, GenerationReport, ReconstructionReport};

fn pct(x: f64) -> String {
    format!("{:.1}%", 100.0 * x)
}

impl GenerationReport {
    /// One `metric<TAB>value` line per metric.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "samples\t{}", self.samples);
        let _ = writeln!(s, "granularity\t{}", self.granularity);
        let _ = writeln!(s, "classes_total\t{}", self.classes_total);
        let _ = writeln!(s, "classes_observed\t{}", self.classes_observed);
        let _ = writeln!(s, "grammar_coverage\t{}", self.grammar_coverage);
        let _ = writeln!(s, "vocabulary_size\t{}", self.vocabulary_size);
        let _ = writeln!(s, "words_observed\t{}", self.words_observed);
        let _ = writeln!(s, "vocabulary_coverage\t{}", self.vocabulary_coverage);
        let _ = writeln!(s, "distinct\t{}", self.distinct);
        let _ = writeln!(s, "distinct_grammatical\t{}", self.distinct_grammatical);
        let _ = writeln!(s, "uniqueness\t{}", self.uniqueness);
        let _ = writeln!(s, "validity\t{}", self.validity);
        s
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<22}{:>10}", "metric", "value");
        let rows = [
            ("grammar coverage", pct(self.grammar_coverage)),
            ("vocabulary coverage", pct(self.vocabulary_coverage)),
            ("validity", pct(self.validity)),
            ("uniqueness", pct(self.uniqueness)),
        ];
        for (k, v) in rows {
            let _ = writeln!(s, "{k:<22}{v:>10}");
        }
        let _ = writeln!(
            s,
            "({} samples; {} of {} {} observed)",
            self.samples, self.classes_observed, self.classes_total, self.granularity
        );
        s
    }
}

impl ReconstructionReport {
    pub fn to_kv(&self) -> String {
        self.kv_with_prefix("")
    }

    fn kv_with_prefix(&self, prefix: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{prefix}count\t{}", self.count);
        let _ = writeln!(s, "{prefix}reconstruction_accuracy\t{}", self.reconstruction_accuracy);
        let _ = writeln!(s, "{prefix}grammar_accuracy\t{}", self.grammar_accuracy);
        let _ = writeln!(s, "{prefix}semantic_accuracy\t{}", self.semantic_accuracy);
        s
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<26}{:>10}", "metric", "value");
        let rows = [
            ("reconstruction accuracy", pct(self.reconstruction_accuracy)),
            ("grammar accuracy", pct(self.grammar_accuracy)),
            ("semantic accuracy", pct(self.semantic_accuracy)),
        ];
        for (k, v) in rows {
            let _ = writeln!(s, "{k:<26}{v:>10}");
        }
        let _ = writeln!(s, "({} sentences)", self.count);
        s
    }
}

impl GeneralizationReport {
    pub fn to_kv(&self) -> String {
        let mut s = self.biased.kv_with_prefix("biased.");
        s.push_str(&self.unbiased.kv_with_prefix("unbiased."));
        let _ = writeln!(s, "gap\t{}", self.gap);
        s
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<26}{:>10}{:>10}", "metric", "biased", "unbiased");
        let rows = [
            (
                "reconstruction accuracy",
                self.biased.reconstruction_accuracy,
                self.unbiased.reconstruction_accuracy,
            ),
            ("grammar accuracy", self.biased.grammar_accuracy, self.unbiased.grammar_accuracy),
            ("semantic accuracy", self.biased.semantic_accuracy, self.unbiased.semantic_accuracy),
        ];
        for (k, b, u) in rows {
            let _ = writeln!(s, "{k:<26}{:>10}{:>10}", pct(b), pct(u));
        }
        let _ = writeln!(s, "gap {:+.1} points", 100.0 * self.gap);
        s
    }
}

/// Column header of [`Table1Row::render`].
pub const TABLE1_HEADER: &str = "N_d\tmodel\tgrammar coverage\tvocabulary coverage\tvalidity\tuniqueness\t\
semantic accuracy\tgrammar accuracy\treconstruction accuracy biased\treconstruction accuracy unbiased";

/// A row shaped like the standard embedding comparison table. Missing parts
/// render as `-`.
#[derive(Debug, Clone, Default)]
pub struct Table1Row {
    pub model: String,
    pub dims: usize,
    pub generation: Option<GenerationReport>,
    /// Supplies semantic and grammar accuracy.
    pub reconstruction: Option<ReconstructionReport>,
    pub generalization: Option<GeneralizationReport>,
}

impl Table1Row {
    pub fn render(&self) -> String {
        let opt = |x: Option<f64>| x.map_or_else(|| "-".to_owned(), pct);
        let g = self.generation.as_ref();
        let r = self
            .reconstruction
            .as_ref()
            .or(self.generalization.as_ref().map(|x| &x.biased));
        let gen = self.generalization.as_ref();
        let biased = gen
            .map(|x| x.biased.reconstruction_accuracy)
            .or(self.reconstruction.as_ref().map(|r| r.reconstruction_accuracy));
        [
            self.dims.to_string(),
            self.model.clone(),
            opt(g.map(|g| g.grammar_coverage)),
            opt(g.map(|g| g.vocabulary_coverage)),
            opt(g.map(|g| g.validity)),
            opt(g.map(|g| g.uniqueness)),
            opt(r.map(|r| r.semantic_accuracy)),
            opt(r.map(|r| r.grammar_accuracy)),
            opt(biased),
            opt(gen.map(|x| x.unbiased.reconstruction_accuracy)),
        ]
        .join("\t")
    }
}
