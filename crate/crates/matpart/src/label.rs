//! Tuple labels, label categories, and their partial orders.
//!
//! Four alphabets are supported: `{0,1}` with 0 and 1 incomparable, `{0,1}`
//! ordered as a chain (the CSP order), `{0,1,*}` where `*` lies above both,
//! and `{0,1,*,e}` which adds a bottom label `e` below everything.
//! Homomorphisms may only increase labels in these orders, so `*` absorbs
//! 0 and 1 while `e` maps anywhere.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A tuple label. Serialized tokens are `0`, `1`, `*`, and `e`.
///
/// The derived `Ord` is the token order used for deterministic tie-breaking
/// in serializers; the semantic order of a category is [`label_leq`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    /// Token `0`.
    Zero,
    /// Token `1`.
    One,
    /// Token `*`; absorbs 0 and 1 where admitted.
    Star,
    /// Token `e`; the bottom label of the largest category.
    Empty,
}

impl Label {
    /// All labels in token order.
    pub const ALL: [Label; 4] = [Label::Zero, Label::One, Label::Star, Label::Empty];

    /// Stable one-byte encoding used by canonical forms.
    pub(crate) fn code(self) -> u8 {
        match self {
            Label::Zero => 0,
            Label::One => 1,
            Label::Star => 2,
            Label::Empty => 3,
        }
    }

    /// Serialized token.
    pub fn token(self) -> &'static str {
        match self {
            Label::Zero => "0",
            Label::One => "1",
            Label::Star => "*",
            Label::Empty => "e",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0" => Ok(Label::Zero),
            "1" => Ok(Label::One),
            "*" => Ok(Label::Star),
            "e" => Ok(Label::Empty),
            other => Err(Error::Parse {
                line: 0,
                msg: format!("unknown label token `{other}`"),
            }),
        }
    }
}

/// A label category: an alphabet together with its partial order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Category {
    /// `{0,1}`, 0 and 1 incomparable. Instances of the basic problem.
    C01,
    /// `{0,1,*}` with `0 <= *` and `1 <= *`.
    CStar,
    /// `{0,1,*,e}` with `e <= 0 <= *` and `e <= 1 <= *`.
    CEmpty,
    /// `{0,1}` with `0 <= 1`; ordinary relational homomorphisms.
    CCsp,
}

impl Category {
    /// All categories, in serialization order.
    pub const ALL: [Category; 4] = [
        Category::C01,
        Category::CStar,
        Category::CEmpty,
        Category::CCsp,
    ];

    /// The admitted labels, in token order.
    pub fn labels(self) -> &'static [Label] {
        match self {
            Category::C01 | Category::CCsp => &[Label::Zero, Label::One],
            Category::CStar => &[Label::Zero, Label::One, Label::Star],
            Category::CEmpty => &[Label::Zero, Label::One, Label::Star, Label::Empty],
        }
    }

    /// Whether `label` is part of this category's alphabet.
    pub fn admits(self, label: Label) -> bool {
        match self {
            Category::C01 | Category::CCsp => matches!(label, Label::Zero | Label::One),
            Category::CStar => label != Label::Empty,
            Category::CEmpty => true,
        }
    }

    /// Order test without admission checks; callers must validate labels.
    pub(crate) fn leq_raw(self, a: Label, b: Label) -> bool {
        if a == b {
            return true;
        }
        match self {
            Category::C01 => false,
            Category::CCsp => a == Label::Zero && b == Label::One,
            Category::CStar => b == Label::Star,
            Category::CEmpty => a == Label::Empty || b == Label::Star,
        }
    }

    /// Serialized token (`01`, `star`, `empty`, `csp`).
    pub fn token(self) -> &'static str {
        match self {
            Category::C01 => "01",
            Category::CStar => "star",
            Category::CEmpty => "empty",
            Category::CCsp => "csp",
        }
    }

    /// Stable one-byte encoding used by canonical forms.
    pub(crate) fn code(self) -> u8 {
        match self {
            Category::C01 => 0,
            Category::CStar => 1,
            Category::CEmpty => 2,
            Category::CCsp => 3,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "01" => Ok(Category::C01),
            "star" => Ok(Category::CStar),
            "empty" => Ok(Category::CEmpty),
            "csp" => Ok(Category::CCsp),
            other => Err(Error::Parse {
                line: 0,
                msg: format!("unknown category `{other}`"),
            }),
        }
    }
}

fn check_admitted(label: Label, cat: Category) -> Result<()> {
    if cat.admits(label) {
        Ok(())
    } else {
        Err(Error::LabelNotAdmitted {
            label,
            category: cat,
        })
    }
}

/// Whether `a` lies below `b` in `cat`'s order (reflexive).
///
/// Errors if either label is outside `cat`'s alphabet.
pub fn label_leq(a: Label, b: Label, cat: Category) -> Result<bool> {
    check_admitted(a, cat)?;
    check_admitted(b, cat)?;
    Ok(cat.leq_raw(a, b))
}

/// Least upper bound of `a` and `b`.
///
/// Only `CStar` and `CEmpty` have joins for every pair: the incomparable
/// pair `{0,1}` joins to `*`. The two-label categories are rejected.
pub fn label_join(a: Label, b: Label, cat: Category) -> Result<Label> {
    if !matches!(cat, Category::CStar | Category::CEmpty) {
        return Err(Error::JoinUndefined(cat));
    }
    check_admitted(a, cat)?;
    check_admitted(b, cat)?;
    if cat.leq_raw(a, b) {
        Ok(b)
    } else if cat.leq_raw(b, a) {
        Ok(a)
    } else {
        // The only incomparable pair in both categories is {0, 1}.
        Ok(Label::Star)
    }
}

/// The order in which a homomorphism from a `g_cat` structure into an
/// `h_cat` structure is checked: the coarser of the two alphabets.
///
/// The three non-CSP categories nest as `01 < star < empty`; the CSP order
/// is incompatible with all of them because it orders 0 below 1.
pub fn comparison_category(g_cat: Category, h_cat: Category) -> Result<Category> {
    use Category::*;
    match (g_cat, h_cat) {
        (CCsp, CCsp) => Ok(CCsp),
        (CCsp, _) | (_, CCsp) => Err(Error::IncompatibleCategories(g_cat, h_cat)),
        _ => {
            let rank = |c: Category| match c {
                C01 => 0,
                CStar => 1,
                CEmpty => 2,
                CCsp => unreachable!(),
            };
            Ok(if rank(g_cat) >= rank(h_cat) {
                g_cat
            } else {
                h_cat
            })
        }
    }
}
