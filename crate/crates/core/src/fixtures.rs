//! Grammars and catalogs bundled with the crate.

/// `S -> A | B | A A | A B | A C | B B | A B C | B B C`.
pub const TOY_GRAMMAR: &str = include_str!("../fixtures/toy.cfg");

/// Object-question grammar with the full rule structure and a reduced vocabulary.
pub const QUESTION_GRAMMAR: &str = include_str!("../fixtures/questions.cfg");

/// A question grammar small enough to enumerate exhaustively.
pub const MINI_GRAMMAR: &str = include_str!("../fixtures/mini.cfg");

/// Object catalog matching [`QUESTION_GRAMMAR`].
pub const OBJECT_CATALOG: &str = include_str!("../fixtures/catalog.txt");

/// A grammar whose language is the single sentence "a".
pub const SINGLE_GRAMMAR: &str = "S -> 'a'\n";
