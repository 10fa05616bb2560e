use std::fmt;

use serde::Serialize;

/// Grammar symbols. The first block are preterminals assigned straight from
/// lexical entries; the rest are phrase categories.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Cat {
    Det,
    /// Degree marker: more, less, fewer.
    Deg,
    Adj,
    CompAdj,
    Adv,
    CompAdv,
    Cop,
    Have,
    Verb,
    Noun,
    Prep,
    Than,
    /// Relativizer: that, which, who.
    Rel,
    Conj,
    Pro,

    ComparativeSentence,
    DeclarativeSentence,
    Subj,
    NP,
    Nom,
    N1,
    DegNP,
    PP,
    RelCl,
    Pred,
    CompAdjP,
    DegAdvP,
    DegAdjP,
    ThanP,
}

impl Cat {
    pub fn is_sentence(self) -> bool {
        matches!(self, Cat::ComparativeSentence | Cat::DeclarativeSentence)
    }
}

impl fmt::Display for Cat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug)]
pub struct Rule {
    pub lhs: Cat,
    pub rhs: &'static [Cat],
}

use Cat::*;

macro_rules! rules {
    ($($lhs:ident => [$($rhs:ident),+];)*) => {
        &[$(Rule { lhs: $lhs, rhs: &[$($rhs),+] }),*]
    };
}

/// The fixed grammar: the regularized comparative template plus copular
/// declaratives. No rule is a unary cycle.
pub static GRAMMAR: &[Rule] = rules! {
    ComparativeSentence => [Subj, Pred, ThanP];
    ComparativeSentence => [Subj, Pred];
    DeclarativeSentence => [NP, Cop, Adj];
    Subj => [NP];
    Subj => [DegNP];
    ThanP => [Than, NP];
    NP => [Det, Nom];
    NP => [Nom];
    NP => [Pro];
    NP => [NP, RelCl];
    NP => [NP, PP];
    Nom => [N1];
    Nom => [Adj, Nom];
    Nom => [CompAdj, Nom];
    N1 => [Noun];
    N1 => [Noun, N1];
    DegNP => [Deg, Nom];
    PP => [Prep, NP];
    RelCl => [Rel, Pred];
    RelCl => [Rel, Cop, PP];
    Pred => [Cop, CompAdjP];
    Pred => [Cop, DegAdjP];
    Pred => [Have, DegNP];
    Pred => [Verb, DegNP];
    Pred => [Verb, DegAdvP];
    Pred => [Verb, CompAdv];
    Pred => [Verb, CompAdjP];
    Pred => [Pred, Conj, Pred];
    // auxiliaries and modals: "can hold more vapor"
    Pred => [Verb, Pred];
    CompAdjP => [CompAdj];
    CompAdjP => [CompAdj, PP];
    DegAdvP => [Deg, Adv];
    DegAdjP => [Deg, Adj];
};
