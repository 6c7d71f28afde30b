//! Compressed words: letters, concatenations and integer powers.
//!
//! A [`CompressedWord`] denotes a word of up to `u64::MAX` letters without
//! storing them. Subtrees are reference counted, so repeating a block such
//! as `w` many times shares one node, and [`eval_word`] evaluates each shared
//! node once.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::automaton::Dfa;
use crate::error::{argument, Error, Result};
use crate::funcgraph::PowerTable;
use crate::mapping::{compose, StateMapping};

/// Largest nesting depth accepted by [`parse_word`].
pub const MAX_NESTING: usize = 512;

#[derive(Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Letter(usize),
    Concat(Vec<CompressedWord>),
    Power(CompressedWord, u64),
}

/// An expression tree denoting a word.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CompressedWord {
    node: Arc<Node>,
    len: u64,
}

impl CompressedWord {
    pub fn letter(letter: usize) -> Self {
        Self {
            node: Arc::new(Node::Letter(letter)),
            len: 1,
        }
    }

    pub fn empty() -> Self {
        Self {
            node: Arc::new(Node::Concat(Vec::new())),
            len: 0,
        }
    }

    pub fn concat(children: Vec<CompressedWord>) -> Result<Self> {
        let len = children
            .iter()
            .try_fold(0u64, |acc, c| acc.checked_add(c.len))
            .ok_or(Error::LengthOverflow)?;
        Ok(Self {
            node: Arc::new(Node::Concat(children)),
            len,
        })
    }

    pub fn power(base: CompressedWord, exponent: u64) -> Result<Self> {
        let len = base
            .len
            .checked_mul(exponent)
            .ok_or(Error::LengthOverflow)?;
        Ok(Self {
            node: Arc::new(Node::Power(base, exponent)),
            len,
        })
    }

    /// `letter` repeated `count` times, as a single node.
    pub fn letter_power(letter: usize, count: u64) -> Self {
        match count {
            1 => Self::letter(letter),
            _ => Self {
                node: Arc::new(Node::Power(Self::letter(letter), count)),
                len: count,
            },
        }
    }

    /// A plain letter sequence, with runs collapsed into powers.
    pub fn from_letters(letters: &[usize]) -> Self {
        let mut parts = Vec::new();
        let mut i = 0;
        while i < letters.len() {
            let l = letters[i];
            let run = letters[i..].iter().take_while(|&&x| x == l).count();
            parts.push(Self::letter_power(l, run as u64));
            i += run;
        }
        if parts.len() == 1 {
            return parts.pop().unwrap();
        }
        let len = letters.len() as u64;
        Self {
            node: Arc::new(Node::Concat(parts)),
            len,
        }
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    /// Number of letters denoted.
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Largest letter index used, if any letter occurs.
    pub fn max_letter(&self) -> Option<usize> {
        match &*self.node {
            Node::Letter(l) => Some(*l),
            Node::Concat(children) => children.iter().filter_map(Self::max_letter).max(),
            Node::Power(base, e) if *e > 0 => base.max_letter(),
            Node::Power(..) => None,
        }
    }

    /// Number of nodes, counting shared subtrees once per reference.
    pub fn tree_size(&self) -> usize {
        1 + match &*self.node {
            Node::Letter(_) => 0,
            Node::Concat(children) => children.iter().map(Self::tree_size).sum(),
            Node::Power(base, _) => base.tree_size(),
        }
    }

    /// Iterates the letters of the word. Only sensible for short words.
    pub fn letters(&self) -> Letters<'_> {
        Letters {
            stack: vec![Frame::new(self)],
        }
    }

    pub fn to_letter_vec(&self) -> Vec<usize> {
        self.letters().collect()
    }
}

impl fmt::Debug for CompressedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match format_word(self) {
            Ok(s) => write!(f, "CompressedWord({s:?}, len {})", self.len),
            Err(_) => write!(f, "CompressedWord({:?}, len {})", self.node, self.len),
        }
    }
}

struct Frame<'a> {
    word: &'a CompressedWord,
    /// Child index for concatenations, repetitions done for powers.
    step: u64,
}

impl<'a> Frame<'a> {
    fn new(word: &'a CompressedWord) -> Self {
        Self { word, step: 0 }
    }
}

/// Depth-first letter iterator over a [`CompressedWord`].
pub struct Letters<'a> {
    stack: Vec<Frame<'a>>,
}

impl Iterator for Letters<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            let frame = self.stack.last_mut()?;
            let word = frame.word;
            match &*word.node {
                Node::Letter(l) => {
                    self.stack.pop();
                    return Some(*l);
                }
                Node::Concat(children) => {
                    let i = frame.step as usize;
                    if i < children.len() {
                        frame.step += 1;
                        self.stack.push(Frame::new(&children[i]));
                    } else {
                        self.stack.pop();
                    }
                }
                Node::Power(base, e) => {
                    if frame.step < *e && !base.is_empty() {
                        frame.step += 1;
                        self.stack.push(Frame::new(base));
                    } else {
                        self.stack.pop();
                    }
                }
            }
        }
    }
}

/// Number of letters of `w`.
pub fn word_length(w: &CompressedWord) -> u64 {
    w.len()
}

/// The action of `w` on `dfa`, computed structurally in `O(n * tree size)`.
pub fn eval_word(dfa: &Dfa, w: &CompressedWord) -> Result<StateMapping> {
    if let Some(l) = w.max_letter() {
        if l >= dfa.k() {
            return Err(argument(format!(
                "word uses letter {l}, alphabet has {} letters",
                dfa.k()
            )));
        }
    }
    let mut eval = Evaluator {
        dfa,
        mappings: HashMap::new(),
        tables: HashMap::new(),
    };
    eval.eval(w)
}

struct Evaluator<'a> {
    dfa: &'a Dfa,
    /// Results for nodes referenced from several places.
    mappings: HashMap<*const Node, StateMapping>,
    /// Power tables for bases raised more than once.
    tables: HashMap<*const Node, PowerTable>,
}

impl Evaluator<'_> {
    fn shared(w: &CompressedWord) -> bool {
        Arc::strong_count(&w.node) > 1
    }

    fn eval(&mut self, w: &CompressedWord) -> Result<StateMapping> {
        let key = Arc::as_ptr(&w.node);
        if let Some(m) = self.mappings.get(&key) {
            return Ok(m.clone());
        }
        let n = self.dfa.n();
        let result = match &*w.node {
            Node::Letter(l) => self.dfa.letter_action(*l)?,
            Node::Concat(children) => {
                let mut acc: Option<StateMapping> = None;
                for c in children {
                    let m = self.eval(c)?;
                    acc = Some(match acc {
                        None => m,
                        Some(a) => compose(&a, &m)?,
                    });
                }
                acc.unwrap_or_else(|| StateMapping::identity(n))
            }
            Node::Power(base, e) => match *e {
                0 => StateMapping::identity(n),
                1 => self.eval(base)?,
                e => {
                    let base_key = Arc::as_ptr(&base.node);
                    if let Some(table) = self.tables.get(&base_key) {
                        table.power(e)
                    } else {
                        let table = PowerTable::new(&self.eval(base)?);
                        let m = table.power(e);
                        if Self::shared(base) {
                            self.tables.insert(base_key, table);
                        }
                        m
                    }
                }
            },
        };
        if Self::shared(w) {
            self.mappings.insert(key, result.clone());
        }
        Ok(result)
    }
}

/// Renders `w` in the text grammar `WORD := TERM+`, `TERM := ATOM ['^' int]`,
/// `ATOM := 'a' | 'b' | '(' WORD ')'`. The empty word renders as `""`.
pub fn format_word(w: &CompressedWord) -> Result<String> {
    let mut out = String::new();
    write_word(w, &mut out)?;
    Ok(out)
}

fn write_word(w: &CompressedWord, out: &mut String) -> Result<()> {
    match &*w.node {
        Node::Letter(l) => out.push(letter_char(*l)?),
        Node::Concat(children) => {
            for c in children {
                write_word(c, out)?;
            }
        }
        Node::Power(base, _) if base.is_empty() => out.push_str("a^0"),
        Node::Power(base, e) => {
            match &*base.node {
                Node::Letter(l) => out.push(letter_char(*l)?),
                _ => {
                    out.push('(');
                    write_word(base, out)?;
                    out.push(')');
                }
            }
            out.push('^');
            out.push_str(&e.to_string());
        }
    }
    Ok(())
}

fn letter_char(l: usize) -> Result<char> {
    match l {
        0 => Ok('a'),
        1 => Ok('b'),
        _ => Err(argument(format!(
            "letter {l} has no text form (only a and b)"
        ))),
    }
}

/// Parses the text grammar of [`format_word`]. Whitespace is ignored, and
/// blank input denotes the empty word.
pub fn parse_word(text: &str) -> Result<CompressedWord> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
        depth: 0,
    };
    p.skip_ws();
    if p.pos == p.bytes.len() {
        return Ok(CompressedWord::empty());
    }
    let w = p.word()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.error(format!("unexpected {:?}", p.bytes[p.pos] as char)));
    }
    Ok(w)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn word(&mut self) -> Result<CompressedWord> {
        let mut terms = Vec::new();
        while let Some(c) = self.peek() {
            if c == b')' {
                break;
            }
            terms.push(self.term()?);
        }
        match terms.len() {
            0 => Err(self.error("expected a letter or '('")),
            1 => Ok(terms.pop().unwrap()),
            _ => CompressedWord::concat(terms).map_err(|_| self.error("word length overflows")),
        }
    }

    fn term(&mut self) -> Result<CompressedWord> {
        let atom = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(atom);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a nonnegative exponent after '^'"));
        }
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        let e: u64 = digits.parse().map_err(|_| Error::Syntax {
            position: start,
            message: "exponent overflows 64 bits".into(),
        })?;
        CompressedWord::power(atom, e).map_err(|_| Error::Syntax {
            position: start,
            message: "word length overflows".into(),
        })
    }

    fn atom(&mut self) -> Result<CompressedWord> {
        match self.peek() {
            Some(b'a') => {
                self.pos += 1;
                Ok(CompressedWord::letter(0))
            }
            Some(b'b') => {
                self.pos += 1;
                Ok(CompressedWord::letter(1))
            }
            Some(b'(') => {
                if self.depth >= MAX_NESTING {
                    return Err(self.error("parentheses nested too deeply"));
                }
                self.depth += 1;
                self.pos += 1;
                let inner = self.word()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                self.depth -= 1;
                Ok(inner)
            }
            Some(c) => Err(self.error(format!("unexpected {:?}", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}
