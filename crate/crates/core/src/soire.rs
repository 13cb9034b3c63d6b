//! Syntax trees of single-occurrence regular expressions with interleaving.
//!
//! A [`Soire`] stores its vertices in preorder. Vertex `t + 1` is the left
//! child of every inner vertex `t`; binary vertices additionally record the
//! index of their right child. Indices are 0-based throughout the crate.

use std::fmt;

use crate::alphabet::{Alphabet, SymbolSet};
use crate::error::{Error, Result};
use crate::notation;

/// The label of a syntax-tree vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Symbol(char),
    Optional,
    Star,
    Plus,
    Concat,
    Interleave,
    Union,
}

impl Label {
    pub const UNARY: [Label; 3] = [Label::Optional, Label::Star, Label::Plus];
    pub const BINARY: [Label; 3] = [Label::Concat, Label::Interleave, Label::Union];

    pub fn from_char(c: char) -> Label {
        match c {
            '?' => Label::Optional,
            '*' => Label::Star,
            '+' => Label::Plus,
            '.' | '·' => Label::Concat,
            '&' => Label::Interleave,
            '|' => Label::Union,
            other => Label::Symbol(other),
        }
    }

    pub fn glyph(self) -> char {
        match self {
            Label::Symbol(c) => c,
            Label::Optional => '?',
            Label::Star => '*',
            Label::Plus => '+',
            Label::Concat => '.',
            Label::Interleave => '&',
            Label::Union => '|',
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Label::Symbol(_) => 0,
            Label::Optional | Label::Star | Label::Plus => 1,
            Label::Concat | Label::Interleave | Label::Union => 2,
        }
    }

    pub fn is_symbol(self) -> bool {
        matches!(self, Label::Symbol(_))
    }

    pub fn is_unary(self) -> bool {
        self.arity() == 1
    }

    pub fn is_binary(self) -> bool {
        self.arity() == 2
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.glyph())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub label: Label,
    /// Index of the right child; set exactly for binary vertices.
    pub right: Option<usize>,
}

/// An owned recursive form of a syntax tree, convenient for rewriting.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Symbol(char),
    Unary(Label, Box<Node>),
    Binary(Label, Box<Node>, Box<Node>),
}

impl Node {
    pub fn unary(op: Label, child: Node) -> Node {
        Node::Unary(op, Box::new(child))
    }

    pub fn binary(op: Label, left: Node, right: Node) -> Node {
        Node::Binary(op, Box::new(left), Box::new(right))
    }

    pub fn size(&self) -> usize {
        match self {
            Node::Symbol(_) => 1,
            Node::Unary(_, c) => 1 + c.size(),
            Node::Binary(_, l, r) => 1 + l.size() + r.size(),
        }
    }

    fn preorder(&self, out: &mut Vec<Label>) {
        match self {
            Node::Symbol(c) => out.push(Label::Symbol(*c)),
            Node::Unary(op, c) => {
                out.push(*op);
                c.preorder(out);
            }
            Node::Binary(op, l, r) => {
                out.push(*op);
                l.preorder(out);
                r.preorder(out);
            }
        }
    }

    pub fn labels(&self) -> Vec<Label> {
        let mut out = Vec::with_capacity(self.size());
        self.preorder(&mut out);
        out
    }
}

/// An immutable SOIRE syntax tree over a fixed alphabet.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Soire {
    alphabet: Alphabet,
    vertices: Vec<Vertex>,
    alphas: Vec<SymbolSet>,
}

impl Soire {
    /// Builds the tree whose preorder traversal is `labels`, scanning from
    /// back to front with a stack of subtree roots.
    pub fn from_labels(labels: &[Label], sigma: &Alphabet) -> Result<Soire> {
        if !notation::prefix_is_well_formed(labels.iter().map(|l| l.arity())) {
            let text: String = labels.iter().map(|l| l.glyph()).collect();
            return Err(Error::InvalidPrefix(text));
        }
        let mut vertices: Vec<Vertex> = labels
            .iter()
            .map(|&label| Vertex { label, right: None })
            .collect();
        let mut alphas = vec![SymbolSet::EMPTY; labels.len()];
        let mut seen = SymbolSet::EMPTY;
        let mut stack: Vec<usize> = Vec::with_capacity(labels.len());
        for t in (0..labels.len()).rev() {
            match labels[t] {
                Label::Symbol(c) => {
                    let k = sigma.index_of(c).ok_or(Error::UnknownCharacter(c))?;
                    if seen.contains(k) {
                        return Err(Error::DuplicateSymbol(c));
                    }
                    seen = seen.with(k);
                    alphas[t] = SymbolSet::singleton(k);
                }
                label if label.is_unary() => {
                    let child = stack.pop().expect("checked by well-formedness");
                    debug_assert_eq!(child, t + 1);
                    alphas[t] = alphas[child];
                }
                _ => {
                    let left = stack.pop().expect("checked by well-formedness");
                    let right = stack.pop().expect("checked by well-formedness");
                    debug_assert_eq!(left, t + 1);
                    vertices[t].right = Some(right);
                    alphas[t] = alphas[left].union(alphas[right]);
                }
            }
            stack.push(t);
        }
        debug_assert_eq!(stack, vec![0]);
        Ok(Soire {
            alphabet: sigma.clone(),
            vertices,
            alphas,
        })
    }

    /// Parses prefix notation. Whitespace is ignored; `·` is accepted for `.`.
    pub fn parse_prefix(text: &str, sigma: &Alphabet) -> Result<Soire> {
        let labels: Vec<Label> = text
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match Label::from_char(c) {
                Label::Symbol(s) if !sigma.contains(s) => Err(Error::UnknownCharacter(s)),
                label => Ok(label),
            })
            .collect::<Result<_>>()?;
        if labels.is_empty() {
            return Err(Error::InvalidPrefix(String::new()));
        }
        Soire::from_labels(&labels, sigma)
    }

    /// Parses infix notation (see [`notation::parse_infix`]).
    pub fn parse_infix(text: &str, sigma: &Alphabet) -> Result<Soire> {
        let node = notation::parse_infix(text)?;
        Soire::from_node(&node, sigma)
    }

    /// Accepts either notation: prefix when the text is a valid prefix form,
    /// infix otherwise.
    pub fn parse(text: &str, sigma: &Alphabet) -> Result<Soire> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if notation::validate_prefix(&compact) {
            Soire::parse_prefix(&compact, sigma)
        } else {
            Soire::parse_infix(text, sigma)
        }
    }

    pub fn from_node(node: &Node, sigma: &Alphabet) -> Result<Soire> {
        Soire::from_labels(&node.labels(), sigma)
    }

    pub fn to_node(&self) -> Node {
        self.node_at(0)
    }

    fn node_at(&self, t: usize) -> Node {
        let v = self.vertices[t];
        match v.label {
            Label::Symbol(c) => Node::Symbol(c),
            op if op.is_unary() => Node::unary(op, self.node_at(t + 1)),
            op => Node::binary(op, self.node_at(t + 1), self.node_at(v.right.unwrap())),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// The same expression over a different alphabet containing its symbols.
    pub fn with_alphabet(&self, sigma: &Alphabet) -> Result<Soire> {
        Soire::from_labels(&self.labels(), sigma)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, t: usize) -> Vertex {
        self.vertices[t]
    }

    pub fn labels(&self) -> Vec<Label> {
        self.vertices.iter().map(|v| v.label).collect()
    }

    /// Number of vertices of the syntax tree.
    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    /// Right child of a binary vertex.
    pub fn right_child(&self, t: usize) -> Option<usize> {
        self.vertices[t].right
    }

    /// Symbols of the subtree rooted at `t`.
    pub fn alpha(&self, t: usize) -> Result<SymbolSet> {
        self.alphas.get(t).copied().ok_or(Error::IndexOutOfRange {
            index: t,
            size: self.size(),
        })
    }

    pub(crate) fn alpha_unchecked(&self, t: usize) -> SymbolSet {
        self.alphas[t]
    }

    /// Symbols of the whole expression.
    pub fn symbols(&self) -> SymbolSet {
        self.alphas[0]
    }

    pub fn to_prefix(&self) -> String {
        self.vertices.iter().map(|v| v.label.glyph()).collect()
    }

    /// Fully parenthesized infix notation.
    pub fn to_infix(&self) -> String {
        notation::to_infix(&self.to_prefix()).expect("a syntax tree always has a valid prefix form")
    }

    /// Rewrites chains of unary operators into a single equivalent operator.
    pub fn normalize_unary(&self) -> Soire {
        let node = normalize_node(self.to_node());
        Soire::from_node(&node, &self.alphabet).expect("normalization preserves validity")
    }
}

impl fmt::Debug for Soire {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Soire({})", self.to_prefix())
    }
}

impl fmt::Display for Soire {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_infix())
    }
}

/// `(r^inner)^outer` collapsed to a single operator.
fn collapse(inner: Label, outer: Label) -> Label {
    use Label::*;
    match (inner, outer) {
        (Optional, Optional) => Optional,
        (Plus, Plus) => Plus,
        _ => Star,
    }
}

fn normalize_node(node: Node) -> Node {
    match node {
        Node::Symbol(_) => node,
        Node::Unary(outer, child) => match normalize_node(*child) {
            Node::Unary(inner, grandchild) => Node::Unary(collapse(inner, outer), grandchild),
            child => Node::Unary(outer, Box::new(child)),
        },
        Node::Binary(op, l, r) => Node::binary(op, normalize_node(*l), normalize_node(*r)),
    }
}

/// Keeps the characters of `s` whose alphabet index is in `keep`.
pub fn filter_set(s: &str, sigma: &Alphabet, keep: SymbolSet) -> String {
    crate::alphabet::filter(s, |c| sigma.index_of(c).is_some_and(|k| keep.contains(k)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> Alphabet {
        Alphabet::parse("abc").unwrap()
    }

    #[test]
    fn parse_figure_one_tree() {
        let r = Soire::parse_prefix("·&ab*c", &abc()).unwrap();
        let labels: String = r.labels().iter().map(|l| l.glyph()).collect();
        assert_eq!(labels, ".&ab*c");
        assert_eq!(r.right_child(0), Some(4));
        assert_eq!(r.right_child(1), Some(3));
        assert_eq!(r.right_child(4), None);
        assert_eq!(r.size(), 6);
        assert_eq!(r.to_prefix(), ".&ab*c");
    }

    #[test]
    fn parse_ignores_whitespace() {
        let r = Soire::parse_prefix("· & a b * c", &abc()).unwrap();
        assert_eq!(r.to_prefix(), ".&ab*c");
    }

    #[test]
    fn single_leaf_and_plus_tree() {
        let a = Soire::parse_prefix("a", &abc()).unwrap();
        assert_eq!(a.size(), 1);
        assert_eq!(a.to_prefix(), "a");
        let r = Soire::parse_prefix("+.*ab", &abc()).unwrap();
        assert_eq!(r.size(), 5);
        assert_eq!(r.right_child(1), Some(4));
        assert_eq!(r.to_prefix(), "+.*ab");
    }

    #[test]
    fn parse_errors() {
        let sigma = abc();
        assert!(matches!(Soire::parse_prefix(".a", &sigma), Err(Error::InvalidPrefix(_))));
        assert!(matches!(Soire::parse_prefix("", &sigma), Err(Error::InvalidPrefix(_))));
        assert!(matches!(Soire::parse_prefix(".aa", &sigma), Err(Error::DuplicateSymbol('a'))));
        assert!(matches!(Soire::parse_prefix(".ad", &sigma), Err(Error::UnknownCharacter('d'))));
        assert!(matches!(Soire::parse_prefix("ab", &sigma), Err(Error::InvalidPrefix(_))));
    }

    #[test]
    fn alpha_of_subtrees() {
        let sigma = abc();
        let r = Soire::parse_prefix(".&ab*c", &sigma).unwrap();
        assert_eq!(r.alpha(0).unwrap().chars(&sigma), vec!['a', 'b', 'c']);
        assert_eq!(r.alpha(1).unwrap().chars(&sigma), vec!['a', 'b']);
        assert_eq!(r.alpha(2).unwrap().chars(&sigma), vec!['a']);
        assert!(matches!(r.alpha(6), Err(Error::IndexOutOfRange { index: 6, size: 6 })));
    }

    #[test]
    fn filter_examples() {
        let sigma = Alphabet::parse("abcd").unwrap();
        let keep = sigma.set_of("abc");
        assert_eq!(filter_set("dbac", &sigma, keep), "bac");
        assert_eq!(filter_set("", &sigma, keep), "");
        assert_eq!(filter_set("abc", &sigma, SymbolSet::EMPTY), "");
    }

    #[test]
    fn unary_identities() {
        let sigma = abc();
        let cases = [
            ("??a", "?a"),
            ("*?a", "*a"),
            ("+?a", "*a"),
            ("**a", "*a"),
            ("?*a", "*a"),
            ("+*a", "*a"),
            ("++a", "+a"),
            ("?+a", "*a"),
            ("*+a", "*a"),
            ("a", "a"),
            ("?*+?a", "*a"),
            ("&??a+*b", "&?a*b"),
        ];
        for (input, expected) in cases {
            let r = Soire::parse_prefix(input, &sigma).unwrap();
            assert_eq!(r.normalize_unary().to_prefix(), expected, "{input}");
        }
    }

    #[test]
    fn node_round_trip() {
        let sigma = abc();
        let r = Soire::parse_prefix("|.?a*b+c", &sigma).unwrap();
        assert_eq!(Soire::from_node(&r.to_node(), &sigma).unwrap(), r);
    }
}
