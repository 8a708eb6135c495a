use serde::Serialize;

use super::{fold, ResourceBundle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Male,
    Female,
    Neuter,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Number {
    Singular,
    Plural,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Agent,
    Object,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Possessive {
    None,
    Determiner,
    Independent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PronounKey {
    pub gender: Gender,
    pub number: Number,
    pub role: Role,
    pub possessive: Possessive,
}

const GENDERS: [(Gender, &str); 4] = [
    (Gender::Male, "male"),
    (Gender::Female, "female"),
    (Gender::Neuter, "neuter"),
    (Gender::Unknown, "unknown"),
];
const NUMBERS: [(Number, &str); 2] = [(Number::Singular, "singular"), (Number::Plural, "plural")];
const ROLES: [(Role, &str); 2] = [(Role::Agent, "agent"), (Role::Object, "object")];
const POSSESSIVES: [(Possessive, &str); 3] = [
    (Possessive::None, "none"),
    (Possessive::Determiner, "determiner"),
    (Possessive::Independent, "independent"),
];

fn lookup<T: Copy>(table: &[(T, &str)], s: &str, what: &str) -> Result<T, String> {
    table
        .iter()
        .find(|(_, n)| *n == s)
        .map(|(v, _)| *v)
        .ok_or_else(|| format!("unknown {what} `{s}`"))
}

fn name<T: PartialEq>(table: &[(T, &'static str)], v: T) -> &'static str {
    table.iter().find(|(x, _)| *x == v).map(|(_, n)| *n).unwrap()
}

impl PronounKey {
    /// All 48 cells of the key domain.
    pub fn all() -> impl Iterator<Item = PronounKey> {
        GENDERS.into_iter().flat_map(|(gender, _)| {
            NUMBERS.into_iter().flat_map(move |(number, _)| {
                ROLES.into_iter().flat_map(move |(role, _)| {
                    POSSESSIVES
                        .into_iter()
                        .map(move |(possessive, _)| PronounKey { gender, number, role, possessive })
                })
            })
        })
    }

    pub(crate) fn parse(g: &str, n: &str, r: &str, p: &str) -> Result<Self, String> {
        Ok(PronounKey {
            gender: lookup(&GENDERS, g, "gender")?,
            number: lookup(&NUMBERS, n, "number")?,
            role: lookup(&ROLES, r, "role")?,
            possessive: lookup(&POSSESSIVES, p, "possessive kind")?,
        })
    }

    pub fn to_fields(self) -> [&'static str; 4] {
        [
            name(&GENDERS, self.gender),
            name(&NUMBERS, self.number),
            name(&ROLES, self.role),
            name(&POSSESSIVES, self.possessive),
        ]
    }
}

/// English pronoun for a cell. Plural and unknown-gender cells use they-forms.
pub(crate) fn default_pronoun(k: PronounKey) -> &'static str {
    use Possessive as P;
    let they = k.number == Number::Plural || k.gender == Gender::Unknown;
    match (they, k.gender, k.role, k.possessive) {
        (true, _, Role::Agent, P::None) => "they",
        (true, _, Role::Object, P::None) => "them",
        (true, _, _, P::Determiner) => "their",
        (true, _, _, P::Independent) => "theirs",
        (false, Gender::Male, Role::Agent, P::None) => "he",
        (false, Gender::Male, Role::Object, P::None) => "him",
        (false, Gender::Male, _, _) => "his",
        (false, Gender::Female, Role::Agent, P::None) => "she",
        (false, Gender::Female, _, P::Independent) => "hers",
        (false, Gender::Female, _, _) => "her",
        (false, _, _, P::None) => "it",
        (false, _, _, _) => "its",
    }
}

const FEMALE_SUFFIXES: &[&str] = &["ette", "elle", "ine", "ina", "ia", "a"];
const MALE_SUFFIXES: &[&str] = &["us", "o"];

impl ResourceBundle {
    /// Gender from the first token of a personal name. Only `Male`, `Female`
    /// or `Unknown` are returned.
    pub fn predict_gender(&self, name: &str) -> Gender {
        let Some(first) = name.split_whitespace().next() else {
            return Gender::Unknown;
        };
        let key = fold(first);
        if let Some(g) = self.names.get(&key) {
            return *g;
        }
        // suffixes fire only on a plausible given name: capitalized, lowercase tail, 3+ letters
        let shaped = first.chars().count() >= 3
            && first.chars().next().is_some_and(char::is_uppercase)
            && first.chars().skip(1).all(char::is_lowercase);
        if !shaped {
            return Gender::Unknown;
        }
        if FEMALE_SUFFIXES.iter().any(|s| key.ends_with(s)) {
            Gender::Female
        } else if MALE_SUFFIXES.iter().any(|s| key.ends_with(s)) {
            Gender::Male
        } else {
            Gender::Unknown
        }
    }

    pub fn pronoun(&self, key: PronounKey) -> &str {
        // the loader guarantees totality
        self.pronouns.get(&key).map(String::as_str).unwrap_or_else(|| default_pronoun(key))
    }
}
