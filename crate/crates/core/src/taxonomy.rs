//! The fixed three-level label space and its parent-child structure.
//!
//! Level A is binary (sexist / not sexist), level B refines sexist posts
//! into four categories, and level C refines those into eleven fine-grained
//! vectors. Every vector belongs to exactly one category and every category
//! rolls up to the sexist side of level A; "not sexist" has no children.
//!
//! Label strings are parsed by their numeric prefix where one exists
//! ("2. derogation", "3.2 immutable gender differences and gender
//! stereotypes"); the prefix is the stable key and the name is display
//! text. Parsing is case-insensitive and tolerant of spacing differences.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Which classification level a label or dataset belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TaskLevel {
    A,
    B,
    C,
}

impl TaskLevel {
    pub fn as_str(&self) -> &'static str {
        match self {
            TaskLevel::A => "A",
            TaskLevel::B => "B",
            TaskLevel::C => "C",
        }
    }
}

impl fmt::Display for TaskLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TaskLevel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(TaskLevel::A),
            "B" => Ok(TaskLevel::B),
            "C" => Ok(TaskLevel::C),
            other => Err(format!("unknown task level {other:?} (expected A, B or C)")),
        }
    }
}

/// Binary level-A label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaskALabel {
    Sexist,
    NotSexist,
}

impl TaskALabel {
    pub fn render(&self) -> &'static str {
        match self {
            TaskALabel::Sexist => "sexist",
            TaskALabel::NotSexist => "not sexist",
        }
    }

    /// Identifier-safe form used in file headers and JSON keys.
    pub fn key(&self) -> &'static str {
        match self {
            TaskALabel::Sexist => "sexist",
            TaskALabel::NotSexist => "not_sexist",
        }
    }
}

const CATEGORY_NAMES: [&str; 4] = [
    "threats, plans to harm and incitement",
    "derogation",
    "animosity",
    "prejudiced discussions",
];

/// One of the four level-B categories, identified by its numeric prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CategoryLabel {
    id: u8,
}

impl CategoryLabel {
    pub fn new(id: u8) -> Option<Self> {
        (1..=4).contains(&id).then_some(Self { id })
    }

    pub fn id(&self) -> u8 {
        self.id
    }

    pub fn name(&self) -> &'static str {
        CATEGORY_NAMES[self.id as usize - 1]
    }

    pub fn render(&self) -> String {
        format!("{}. {}", self.id, self.name())
    }

    pub fn key(&self) -> String {
        self.id.to_string()
    }

    /// Every category rolls up to the sexist side of level A.
    pub fn parent(&self) -> TaskALabel {
        TaskALabel::Sexist
    }

    pub fn children(&self) -> Vec<VectorLabel> {
        Taxonomy::vectors()
            .into_iter()
            .filter(|v| v.parent() == *self)
            .collect()
    }
}

/// (category, sub-index, display name) for the eleven level-C vectors.
const VECTOR_TABLE: [(u8, u8, &str); 11] = [
    (1, 1, "threats of harm"),
    (1, 2, "incitement and encouragement of harm"),
    (2, 1, "descriptive attacks"),
    (2, 2, "aggressive and emotive attacks"),
    (2, 3, "dehumanising attacks and overt sexual objectification"),
    (3, 1, "causal use of gendered slurs, profanities and insults"),
    (3, 2, "immutable gender differences and gender stereotypes"),
    (3, 3, "backhanded gendered compliments"),
    (3, 4, "condescending explanations or unwelcome advice"),
    (4, 1, "supporting mistreatment of individual women"),
    (4, 2, "supporting systemic discrimination against women as a group"),
];

/// One of the eleven fine-grained level-C vectors, identified by its
/// two-part numeric code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VectorLabel {
    category: u8,
    sub: u8,
}

impl VectorLabel {
    pub fn new(category: u8, sub: u8) -> Option<Self> {
        VECTOR_TABLE
            .iter()
            .any(|&(c, s, _)| c == category && s == sub)
            .then_some(Self { category, sub })
    }

    pub fn code(&self) -> (u8, u8) {
        (self.category, self.sub)
    }

    pub fn name(&self) -> &'static str {
        VECTOR_TABLE
            .iter()
            .find(|&&(c, s, _)| c == self.category && s == self.sub)
            .map(|&(_, _, n)| n)
            .expect("vector label constructed outside the taxonomy")
    }

    pub fn render(&self) -> String {
        format!("{}.{} {}", self.category, self.sub, self.name())
    }

    pub fn key(&self) -> String {
        format!("{}.{}", self.category, self.sub)
    }

    /// The unique category this vector belongs to.
    pub fn parent(&self) -> CategoryLabel {
        CategoryLabel::new(self.category).expect("vector codes carry a valid category id")
    }
}

/// A label at any of the three levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    A(TaskALabel),
    B(CategoryLabel),
    C(VectorLabel),
}

impl Label {
    pub fn level(&self) -> TaskLevel {
        match self {
            Label::A(_) => TaskLevel::A,
            Label::B(_) => TaskLevel::B,
            Label::C(_) => TaskLevel::C,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Label::A(l) => l.render().to_string(),
            Label::B(l) => l.render(),
            Label::C(l) => l.render(),
        }
    }

    pub fn key(&self) -> String {
        match self {
            Label::A(l) => l.key().to_string(),
            Label::B(l) => l.key(),
            Label::C(l) => l.key(),
        }
    }

    pub fn as_a(&self) -> Option<TaskALabel> {
        match self {
            Label::A(l) => Some(*l),
            _ => None,
        }
    }

    pub fn as_b(&self) -> Option<CategoryLabel> {
        match self {
            Label::B(l) => Some(*l),
            _ => None,
        }
    }

    pub fn as_c(&self) -> Option<VectorLabel> {
        match self {
            Label::C(l) => Some(*l),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// The compiled-in label taxonomy.
pub struct Taxonomy;

impl Taxonomy {
    pub fn task_a_labels() -> [TaskALabel; 2] {
        [TaskALabel::Sexist, TaskALabel::NotSexist]
    }

    pub fn categories() -> [CategoryLabel; 4] {
        [1, 2, 3, 4].map(|id| CategoryLabel::new(id).unwrap())
    }

    pub fn vectors() -> [VectorLabel; 11] {
        VECTOR_TABLE.map(|(c, s, _)| VectorLabel { category: c, sub: s })
    }

    /// Canonical class ordering for a level; model rows, confusion-matrix
    /// rows and probability columns all follow this order.
    pub fn class_list(level: TaskLevel) -> Vec<Label> {
        match level {
            TaskLevel::A => Self::task_a_labels().iter().map(|&l| Label::A(l)).collect(),
            TaskLevel::B => Self::categories().iter().map(|&l| Label::B(l)).collect(),
            TaskLevel::C => Self::vectors().iter().map(|&l| Label::C(l)).collect(),
        }
    }

    pub fn dump_json() -> serde_json::Value {
        serde_json::json!({
            "levels": {
                "A": Self::task_a_labels().iter().map(|l| serde_json::json!({
                    "key": l.key(),
                    "name": l.render(),
                })).collect::<Vec<_>>(),
                "B": Self::categories().iter().map(|l| serde_json::json!({
                    "key": l.key(),
                    "name": l.name(),
                    "parent": l.parent().key(),
                })).collect::<Vec<_>>(),
                "C": Self::vectors().iter().map(|l| serde_json::json!({
                    "key": l.key(),
                    "name": l.name(),
                    "parent": l.parent().key(),
                })).collect::<Vec<_>>(),
            }
        })
    }
}

/// Lowercase, trim, and collapse internal whitespace; the tables this data
/// comes from are inconsistent about spacing ("2.derogation" vs
/// "2. derogation").
fn normalize(raw: &str) -> String {
    raw.trim()
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Splits a normalized label into its numeric prefix (if any) and the rest.
///
/// Returns `(category, sub, rest)` where `sub` is present only for
/// two-part codes like "3.2". A trailing period directly after the prefix
/// is stripped ("2." parses like "2").
fn split_prefix(s: &str) -> Option<(u8, Option<u8>, &str)> {
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i == 0 {
        return None;
    }
    let first: u8 = s[..i].parse().ok()?;
    let mut rest = &s[i..];
    let mut sub = None;
    if let Some(stripped) = rest.strip_prefix('.') {
        let sb = stripped.as_bytes();
        let mut j = 0;
        while j < sb.len() && sb[j].is_ascii_digit() {
            j += 1;
        }
        if j > 0 {
            sub = Some(stripped[..j].parse().ok()?);
            rest = &stripped[j..];
        } else {
            rest = stripped;
        }
    }
    Some((first, sub, rest.trim_start_matches(['.', ' '])))
}

/// Parses a raw label string at the given level into its canonical label.
///
/// Accepts the numeric-prefix forms ("2. derogation", "3.2", "2.derogation"),
/// the bare canonical names, and for category 1 the short alias "threats".
pub fn parse_label(raw: &str, level: TaskLevel) -> Result<Label> {
    let s = normalize(raw);
    let unknown = || Error::UnknownLabel {
        raw: raw.to_string(),
        level,
    };
    match level {
        TaskLevel::A => match s.as_str() {
            "sexist" => Ok(Label::A(TaskALabel::Sexist)),
            "not sexist" | "not_sexist" => Ok(Label::A(TaskALabel::NotSexist)),
            _ => Err(unknown()),
        },
        TaskLevel::B => {
            if let Some((id, sub, _)) = split_prefix(&s) {
                // A two-part code like "3.2" is a level-C string; reject it
                // here rather than silently collapsing to the parent.
                if sub.is_some() {
                    return Err(unknown());
                }
                return CategoryLabel::new(id).map(Label::B).ok_or_else(unknown);
            }
            if s == "threats" {
                return Ok(Label::B(CategoryLabel::new(1).unwrap()));
            }
            Taxonomy::categories()
                .into_iter()
                .find(|c| c.name() == s)
                .map(Label::B)
                .ok_or_else(unknown)
        }
        TaskLevel::C => {
            if let Some((c, Some(sub), _)) = split_prefix(&s) {
                return VectorLabel::new(c, sub).map(Label::C).ok_or_else(unknown);
            }
            Taxonomy::vectors()
                .into_iter()
                .find(|v| v.name() == s)
                .map(Label::C)
                .ok_or_else(unknown)
        }
    }
}

/// Outcome of a cross-level consistency check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConsistencyVerdict {
    Consistent,
    Inconsistent(ConsistencyViolation),
}

impl ConsistencyVerdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, ConsistencyVerdict::Consistent)
    }
}

/// The first rule violated by a (level A, level B, level C) assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConsistencyViolation {
    /// A not-sexist post carries a category or vector label.
    NotSexistWithChildren,
    /// A vector label whose category is missing or not its parent.
    ParentMismatch {
        vector: VectorLabel,
        category: Option<CategoryLabel>,
    },
}

impl fmt::Display for ConsistencyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConsistencyViolation::NotSexistWithChildren => {
                write!(f, "not-sexist label with a category or vector attached")
            }
            ConsistencyViolation::ParentMismatch { vector, category } => match category {
                Some(c) => write!(
                    f,
                    "vector {} belongs to category {}, not {}",
                    vector.key(),
                    vector.parent().key(),
                    c.key()
                ),
                None => write!(f, "vector {} present without its category", vector.key()),
            },
        }
    }
}

/// Checks that labels across levels respect the hierarchy: a not-sexist
/// post has no children, a vector's category must be its parent, and any
/// category implies a sexist level-A label.
pub fn check_consistency(
    a: TaskALabel,
    b: Option<CategoryLabel>,
    c: Option<VectorLabel>,
) -> ConsistencyVerdict {
    if a == TaskALabel::NotSexist && (b.is_some() || c.is_some()) {
        return ConsistencyVerdict::Inconsistent(ConsistencyViolation::NotSexistWithChildren);
    }
    if let Some(vector) = c {
        if b != Some(vector.parent()) {
            return ConsistencyVerdict::Inconsistent(ConsistencyViolation::ParentMismatch {
                vector,
                category: b,
            });
        }
    }
    // "category implies sexist" is already covered: a category on a
    // not-sexist post trips the first rule, and level A is binary.
    ConsistencyVerdict::Consistent
}
