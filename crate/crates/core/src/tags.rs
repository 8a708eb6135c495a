//! Tag inventories shared across the pipeline: named-entity types, coarse
//! part-of-speech classes and the PENN fine tags that the lexicon speaks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The 18 OntoNotes entity types plus the `UNK` fallback.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NeTag {
    Person,
    Norp,
    Fac,
    Org,
    Gpe,
    Loc,
    Product,
    Event,
    WorkOfArt,
    Law,
    Language,
    Date,
    Time,
    Percent,
    Money,
    Quantity,
    Ordinal,
    Cardinal,
    Unk,
}

impl NeTag {
    pub const ALL: [NeTag; 19] = [
        NeTag::Person,
        NeTag::Norp,
        NeTag::Fac,
        NeTag::Org,
        NeTag::Gpe,
        NeTag::Loc,
        NeTag::Product,
        NeTag::Event,
        NeTag::WorkOfArt,
        NeTag::Law,
        NeTag::Language,
        NeTag::Date,
        NeTag::Time,
        NeTag::Percent,
        NeTag::Money,
        NeTag::Quantity,
        NeTag::Ordinal,
        NeTag::Cardinal,
        NeTag::Unk,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NeTag::Person => "PERSON",
            NeTag::Norp => "NORP",
            NeTag::Fac => "FAC",
            NeTag::Org => "ORG",
            NeTag::Gpe => "GPE",
            NeTag::Loc => "LOC",
            NeTag::Product => "PRODUCT",
            NeTag::Event => "EVENT",
            NeTag::WorkOfArt => "WORK_OF_ART",
            NeTag::Law => "LAW",
            NeTag::Language => "LANGUAGE",
            NeTag::Date => "DATE",
            NeTag::Time => "TIME",
            NeTag::Percent => "PERCENT",
            NeTag::Money => "MONEY",
            NeTag::Quantity => "QUANTITY",
            NeTag::Ordinal => "ORDINAL",
            NeTag::Cardinal => "CARDINAL",
            NeTag::Unk => "UNK",
        }
    }

    /// Numeric and temporal values. These are never pronominalised.
    pub fn is_value(self) -> bool {
        matches!(
            self,
            NeTag::Date
                | NeTag::Time
                | NeTag::Percent
                | NeTag::Money
                | NeTag::Quantity
                | NeTag::Ordinal
                | NeTag::Cardinal
        )
    }

    pub fn is_temporal(self) -> bool {
        matches!(self, NeTag::Date | NeTag::Time)
    }
}

impl fmt::Display for NeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NeTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NeTag::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown entity tag `{s}`"))
    }
}

/// Coarse (universal-style) part-of-speech classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Pos {
    Noun,
    Propn,
    Verb,
    Adj,
    Adv,
    Pron,
    Det,
    Adp,
    Num,
    Conj,
    Part,
    Punct,
    X,
}

impl Pos {
    pub const ALL: [Pos; 13] = [
        Pos::Noun,
        Pos::Propn,
        Pos::Verb,
        Pos::Adj,
        Pos::Adv,
        Pos::Pron,
        Pos::Det,
        Pos::Adp,
        Pos::Num,
        Pos::Conj,
        Pos::Part,
        Pos::Punct,
        Pos::X,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Noun => "NOUN",
            Pos::Propn => "PROPN",
            Pos::Verb => "VERB",
            Pos::Adj => "ADJ",
            Pos::Adv => "ADV",
            Pos::Pron => "PRON",
            Pos::Det => "DET",
            Pos::Adp => "ADP",
            Pos::Num => "NUM",
            Pos::Conj => "CONJ",
            Pos::Part => "PART",
            Pos::Punct => "PUNCT",
            Pos::X => "X",
        }
    }

    pub fn is_nominal(self) -> bool {
        matches!(self, Pos::Noun | Pos::Propn | Pos::Adj)
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pos::ALL
            .iter()
            .copied()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown coarse tag `{s}`"))
    }
}

/// A PENN Treebank tag, kept as an interned string.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PennTag(pub String);

impl PennTag {
    pub fn new(tag: impl Into<String>) -> Self {
        PennTag(tag.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_plural_noun(&self) -> bool {
        matches!(self.0.as_str(), "NNS" | "NNPS")
    }
}

impl fmt::Display for PennTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Fallback PENN-to-coarse mapping used when `penn_universal.tsv` is absent.
pub(crate) const DEFAULT_PENN_MAP: &[(&str, Pos)] = &[
    ("CC", Pos::Conj),
    ("CD", Pos::Num),
    ("DT", Pos::Det),
    ("EX", Pos::Det),
    ("FW", Pos::X),
    ("IN", Pos::Adp),
    ("JJ", Pos::Adj),
    ("JJR", Pos::Adj),
    ("JJS", Pos::Adj),
    ("LS", Pos::X),
    ("MD", Pos::Verb),
    ("NN", Pos::Noun),
    ("NNS", Pos::Noun),
    ("NNP", Pos::Propn),
    ("NNPS", Pos::Propn),
    ("PDT", Pos::Det),
    ("POS", Pos::Part),
    ("PRP", Pos::Pron),
    ("PRP$", Pos::Pron),
    ("RB", Pos::Adv),
    ("RBR", Pos::Adv),
    ("RBS", Pos::Adv),
    ("RP", Pos::Part),
    ("SYM", Pos::X),
    ("TO", Pos::Part),
    ("UH", Pos::X),
    ("VB", Pos::Verb),
    ("VBD", Pos::Verb),
    ("VBG", Pos::Verb),
    ("VBN", Pos::Verb),
    ("VBP", Pos::Verb),
    ("VBZ", Pos::Verb),
    ("WDT", Pos::Det),
    ("WP", Pos::Pron),
    ("WP$", Pos::Pron),
    ("WRB", Pos::Adv),
    (".", Pos::Punct),
    (",", Pos::Punct),
    (":", Pos::Punct),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ne_tags_round_trip_through_strings() {
        for t in NeTag::ALL {
            assert_eq!(t.as_str().parse::<NeTag>().unwrap(), t);
        }
        assert!("PERS".parse::<NeTag>().is_err());
        assert_eq!(NeTag::ALL.len(), 19);
    }

    #[test]
    fn serde_uses_tag_spelling() {
        let s = serde_json::to_string(&NeTag::WorkOfArt).unwrap();
        assert_eq!(s, "\"WORK_OF_ART\"");
        assert_eq!(serde_json::to_string(&Pos::Propn).unwrap(), "\"PROPN\"");
    }
}
