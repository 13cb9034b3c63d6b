//! Prefix and infix notations.
//!
//! Prefix notation writes operators before their operands, e.g. `.&ab*c`
//! for `(a&b)c*`. Infix output is fully parenthesized.

use crate::alphabet::is_reserved;
use crate::error::{Error, Result};
use crate::soire::{Label, Node};

/// Running-sum test on a sequence of arities: every suffix must hold at
/// least one complete operand, and the whole sequence exactly one.
pub(crate) fn prefix_is_well_formed(arities: impl DoubleEndedIterator<Item = usize>) -> bool {
    let mut sum: i64 = 0;
    let mut any = false;
    for arity in arities.rev() {
        any = true;
        sum += match arity {
            0 => 1,
            1 => 0,
            _ => -1,
        };
        if sum < 1 {
            return false;
        }
    }
    any && sum == 1
}

fn token_arity(c: char) -> Option<usize> {
    match c {
        '(' | ')' | '#' => None,
        c => Some(Label::from_char(c).arity()),
    }
}

/// Whether `text` is a valid prefix form: each suffix's count of symbols
/// minus binary operators is at least one, and the total is exactly one.
/// Whitespace is ignored.
pub fn validate_prefix(text: &str) -> bool {
    let arities: Option<Vec<usize>> = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(token_arity)
        .collect();
    match arities {
        Some(a) => prefix_is_well_formed(a.into_iter()),
        None => false,
    }
}

/// Converts prefix notation to fully parenthesized infix notation using a
/// back-to-front stack scan. Binary operators take the most recently pushed
/// operand as their left side.
pub fn to_infix(prefix: &str) -> Result<String> {
    if !validate_prefix(prefix) {
        return Err(Error::InvalidPrefix(prefix.to_string()));
    }
    let mut stack: Vec<String> = Vec::new();
    for c in prefix.chars().rev().filter(|c| !c.is_whitespace()) {
        let label = Label::from_char(c);
        match label.arity() {
            0 => stack.push(c.to_string()),
            1 => {
                let r = stack.pop().expect("validated");
                stack.push(format!("({r}{})", label.glyph()));
            }
            _ => {
                let left = stack.pop().expect("validated");
                let right = stack.pop().expect("validated");
                stack.push(format!("({left}{}{right})", label.glyph()));
            }
        }
    }
    Ok(stack.pop().expect("validated"))
}

/// Parses infix notation into a tree.
///
/// Precedence, tightest first: postfix `? * +`, concatenation (juxtaposition
/// or `.`), interleaving `&`, union `|`. Binary operators associate to the left.
pub fn parse_infix(text: &str) -> Result<Node> {
    let tokens: Vec<(usize, char)> = text
        .char_indices()
        .filter(|(_, c)| !c.is_whitespace())
        .collect();
    let mut parser = InfixParser { tokens, pos: 0, len: text.len() };
    let node = parser.union()?;
    if let Some(&(offset, c)) = parser.tokens.get(parser.pos) {
        return Err(Error::InvalidInfix {
            offset,
            message: format!("unexpected `{c}`"),
        });
    }
    Ok(node)
}

struct InfixParser {
    tokens: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

impl InfixParser {
    fn peek(&self) -> Option<char> {
        self.tokens.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.len, |&(o, _)| o)
    }

    fn error(&self, message: &str) -> Error {
        Error::InvalidInfix {
            offset: self.offset(),
            message: message.to_string(),
        }
    }

    fn union(&mut self) -> Result<Node> {
        let mut node = self.interleave()?;
        while self.peek() == Some('|') {
            self.pos += 1;
            let rhs = self.interleave()?;
            node = Node::binary(Label::Union, node, rhs);
        }
        Ok(node)
    }

    fn interleave(&mut self) -> Result<Node> {
        let mut node = self.concat()?;
        while self.peek() == Some('&') {
            self.pos += 1;
            let rhs = self.concat()?;
            node = Node::binary(Label::Interleave, node, rhs);
        }
        Ok(node)
    }

    fn concat(&mut self) -> Result<Node> {
        let mut node = self.postfix()?;
        loop {
            match self.peek() {
                Some('.') | Some('·') => {
                    self.pos += 1;
                    let rhs = self.postfix()?;
                    node = Node::binary(Label::Concat, node, rhs);
                }
                Some(c) if c == '(' || !is_reserved(c) => {
                    let rhs = self.postfix()?;
                    node = Node::binary(Label::Concat, node, rhs);
                }
                _ => return Ok(node),
            }
        }
    }

    fn postfix(&mut self) -> Result<Node> {
        let mut node = self.atom()?;
        while let Some(c @ ('?' | '*' | '+')) = self.peek() {
            self.pos += 1;
            node = Node::unary(Label::from_char(c), node);
        }
        Ok(node)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let node = self.union()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(node)
            }
            Some(c) if !is_reserved(c) => {
                self.pos += 1;
                Ok(Node::Symbol(c))
            }
            Some(c) => Err(self.error(&format!("unexpected `{c}`"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn running_sum_examples() {
        assert!(validate_prefix("·&ab*c"));
        assert!(validate_prefix(".&ab*c"));
        assert!(validate_prefix("a"));
        assert!(!validate_prefix("·a"));
        assert!(!validate_prefix(""));
        assert!(!validate_prefix("?"));
        assert!(!validate_prefix("a?"));
        assert!(!validate_prefix("ab"));
        assert!(!validate_prefix("(a)"));
    }

    #[test]
    fn infix_of_prefix() {
        assert_eq!(to_infix("·&ab*c").unwrap(), "((a&b).(c*))");
        assert_eq!(to_infix("a").unwrap(), "a");
        assert_eq!(to_infix("?a").unwrap(), "(a?)");
        assert!(matches!(to_infix(".a"), Err(Error::InvalidPrefix(_))));
    }

    fn prefix_of(infix: &str) -> String {
        parse_infix(infix)
            .unwrap()
            .labels()
            .iter()
            .map(|l| l.glyph())
            .collect()
    }

    #[test]
    fn infix_precedence() {
        assert_eq!(prefix_of("(a&b)c*"), ".&ab*c");
        assert_eq!(prefix_of("a|b|c"), "||abc");
        assert_eq!(prefix_of("a?&b*&c?"), "&&?a*b?c");
        assert_eq!(prefix_of("ab|c&d"), "|.ab&cd");
        assert_eq!(prefix_of("(a*b)+"), "+.*ab");
        assert_eq!(prefix_of("a·b"), ".ab");
        assert_eq!(prefix_of("((a&b).(c*))"), ".&ab*c");
    }

    #[test]
    fn infix_errors() {
        assert!(parse_infix("").is_err());
        assert!(parse_infix("(ab").is_err());
        assert!(parse_infix("a|").is_err());
        assert!(parse_infix("*a").is_err());
        assert!(parse_infix("a)").is_err());
    }
}
