//! Reading the parenthesized tree format and checking trees against the
//! grammatical signature.
//!
//! Trees arrive as s-expressions in the style grammars dump them:
//!
//! ```text
//! sentence
//! (useCl past pPos
//!  (predVP (usePN (lexemePN "smith_PN"))
//!          (advVP (complSlash (slashV2a (lexemeV2 "write_V2"))
//!                             (detCN (detQuant indefArt numSg)
//!                                    (useN (lexemeN "novel_N"))))
//!                 (lexemeAdv "in_1991_Adv"))))
//! ```
//!
//! A leading bare `sentence`/`hypothesis` token wrapping the whole expression
//! is accepted and stripped during typechecking. The constructor signature is
//! a closed table versioned in `data/signature.sig`; coverage grows by
//! editing that file, not this module.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

use crate::lexicon::Lexicon;

/// Grammatical category of a tree node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    S,
    Cl,
    VP,
    VPSlash,
    NP,
    CN,
    N,
    Det,
    Quant,
    Num,
    Tense,
    Pol,
    Adv,
    V2,
    PN,
    Pron,
    VV,
    V,
    Subj,
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Category, String> {
        Ok(match s {
            "S" => Category::S,
            "Cl" => Category::Cl,
            "VP" => Category::VP,
            "VPSlash" => Category::VPSlash,
            "NP" => Category::NP,
            "CN" => Category::CN,
            "N" => Category::N,
            "Det" => Category::Det,
            "Quant" => Category::Quant,
            "Num" => Category::Num,
            "Tense" => Category::Tense,
            "Pol" => Category::Pol,
            "Adv" => Category::Adv,
            "V2" => Category::V2,
            "PN" => Category::PN,
            "Pron" => Category::Pron,
            "VV" => Category::VV,
            "V" => Category::V,
            "Subj" => Category::Subj,
            other => return Err(format!("unknown category: {other}")),
        })
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Category::S => "S",
            Category::Cl => "Cl",
            Category::VP => "VP",
            Category::VPSlash => "VPSlash",
            Category::NP => "NP",
            Category::CN => "CN",
            Category::N => "N",
            Category::Det => "Det",
            Category::Quant => "Quant",
            Category::Num => "Num",
            Category::Tense => "Tense",
            Category::Pol => "Pol",
            Category::Adv => "Adv",
            Category::V2 => "V2",
            Category::PN => "PN",
            Category::Pron => "Pron",
            Category::VV => "VV",
            Category::V => "V",
            Category::Subj => "Subj",
        };
        f.write_str(name)
    }
}

/// A raw tree: tokens and nesting, nothing checked yet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SynTree {
    Leaf(String),
    Node(Vec<SynTree>),
}

impl SynTree {
    pub fn leaf(token: &str) -> SynTree {
        SynTree::Leaf(token.to_string())
    }

    /// Head token of a node, if its first child is a leaf.
    pub fn head(&self) -> Option<&str> {
        match self {
            SynTree::Leaf(t) => Some(t),
            SynTree::Node(children) => match children.first() {
                Some(SynTree::Leaf(t)) => Some(t),
                _ => None,
            },
        }
    }
}

impl fmt::Display for SynTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynTree::Leaf(t) => f.write_str(t),
            SynTree::Node(children) => {
                f.write_str("(")?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum SyntaxError {
    #[error("unbalanced parentheses")]
    UnbalancedParens,
    #[error("empty expression")]
    EmptyExpression,
    #[error("stray token after expression: {0}")]
    StrayToken(String),
    #[error("empty node: () is not a tree")]
    EmptyNode,
    #[error("bad token: {0}")]
    BadToken(String),
    #[error("unknown constructor: {0}")]
    UnknownConstructor(String),
    #[error("{constructor}: expected {expected} arguments, got {got}")]
    ArityMismatch { constructor: String, expected: usize, got: usize },
    #[error("{constructor}: argument {index} has category {got}, expected {expected}")]
    CategoryMismatch { constructor: String, index: usize, got: Category, expected: Category },
    #[error("unknown lexeme: {0}")]
    UnknownLexeme(String),
    #[error("root category is {0}, expected S")]
    RootNotSentence(Category),
    #[error("signature line {line}: {msg}")]
    SignatureParse { line: usize, msg: String },
}

/// Read one tree from text. Whitespace-insensitive; double-quoted tokens are
/// unescaped into plain leaf tokens. A leading bare identifier followed by a
/// single parenthesized expression (the `sentence (...)` dump style) reads as
/// a node with the identifier as head.
pub fn read_tree(text: &str) -> Result<SynTree, SyntaxError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(SyntaxError::EmptyExpression);
    }
    let mut pos = 0;
    let first = parse_expr(&tokens, &mut pos)?;
    if pos == tokens.len() {
        return Ok(first);
    }
    // `sentence (...)` style: a bare head token before the expression proper.
    if let SynTree::Leaf(_) = first {
        let second = parse_expr(&tokens, &mut pos)?;
        if pos == tokens.len() {
            return Ok(SynTree::Node(vec![first, second]));
        }
    }
    Err(SyntaxError::StrayToken(describe_token(&tokens[pos])))
}

/// Render a tree in the same parenthesized format. `read_tree` is a left
/// inverse: printing and re-reading yields an identical tree.
pub fn print_tree(tree: &SynTree) -> String {
    tree.to_string()
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Open,
    Close,
    Atom(String),
}

fn describe_token(t: &Token) -> String {
    match t {
        Token::Open => "(".into(),
        Token::Close => ")".into(),
        Token::Atom(s) => s.clone(),
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '(' => {
                chars.next();
                tokens.push(Token::Open);
            }
            ')' => {
                chars.next();
                tokens.push(Token::Close);
            }
            '"' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some('\\') => match chars.next() {
                            Some(e) => s.push(e),
                            None => return Err(SyntaxError::UnbalancedParens),
                        },
                        Some(ch) => s.push(ch),
                        None => return Err(SyntaxError::BadToken(format!("\"{s}"))),
                    }
                }
                if s.is_empty() || s.chars().any(|ch| ch.is_whitespace() || ch == '(' || ch == ')')
                {
                    return Err(SyntaxError::BadToken(s));
                }
                tokens.push(Token::Atom(s));
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut s = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_whitespace() || ch == '(' || ch == ')' || ch == '"' {
                        break;
                    }
                    s.push(ch);
                    chars.next();
                }
                tokens.push(Token::Atom(s));
            }
        }
    }
    Ok(tokens)
}

fn parse_expr(tokens: &[Token], pos: &mut usize) -> Result<SynTree, SyntaxError> {
    match tokens.get(*pos) {
        None => Err(SyntaxError::UnbalancedParens),
        Some(Token::Atom(s)) => {
            *pos += 1;
            Ok(SynTree::Leaf(s.clone()))
        }
        Some(Token::Close) => Err(SyntaxError::UnbalancedParens),
        Some(Token::Open) => {
            *pos += 1;
            let mut children = Vec::new();
            loop {
                match tokens.get(*pos) {
                    None => return Err(SyntaxError::UnbalancedParens),
                    Some(Token::Close) => {
                        *pos += 1;
                        break;
                    }
                    _ => children.push(parse_expr(tokens, pos)?),
                }
            }
            if children.is_empty() {
                return Err(SyntaxError::EmptyNode);
            }
            Ok(SynTree::Node(children))
        }
    }
}

/// A category-checked tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedTree {
    pub constructor: String,
    pub category: Category,
    pub children: Vec<TypedTree>,
    pub lexeme: Option<String>,
}

impl TypedTree {
    pub fn child(&self, index: usize) -> &TypedTree {
        &self.children[index]
    }
}

/// Argument slot of a constructor: a subtree of some category, or a quoted
/// lexeme resolved in the lexicon under the given category.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArgSpec {
    Cat(Category),
    Lexeme(Category),
}

/// The closed constructor signature, loaded from `data/signature.sig`.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    constructors: BTreeMap<String, (Vec<ArgSpec>, Category)>,
}

static BUILTIN_SIG: OnceLock<Signature> = OnceLock::new();

impl Signature {
    pub fn builtin() -> &'static Signature {
        BUILTIN_SIG.get_or_init(|| {
            Signature::parse(include_str!("../data/signature.sig"))
                .expect("embedded signature must parse")
        })
    }

    /// Parse the signature table: one constructor per line,
    /// `name argspec* -> category`, where an argspec is a category name or
    /// `$Cat` for a lexeme slot. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Signature, SyntaxError> {
        let mut sig = Signature::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let fields: Vec<&str> = content.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            let err = |msg: String| SyntaxError::SignatureParse { line, msg };
            let arrow = fields
                .iter()
                .position(|f| *f == "->")
                .ok_or_else(|| err("missing ->".into()))?;
            if arrow == 0 || arrow + 2 != fields.len() {
                return Err(err("expected: name argspec* -> category".into()));
            }
            let name = fields[0].to_string();
            let mut args = Vec::new();
            for spec in &fields[1..arrow] {
                if let Some(cat) = spec.strip_prefix('$') {
                    args.push(ArgSpec::Lexeme(cat.parse().map_err(err)?));
                } else {
                    args.push(ArgSpec::Cat(spec.parse().map_err(err)?));
                }
            }
            let result: Category = fields[arrow + 1].parse().map_err(err)?;
            sig.constructors.insert(name, (args, result));
        }
        Ok(sig)
    }

    pub fn get(&self, name: &str) -> Option<(&[ArgSpec], Category)> {
        self.constructors.get(name).map(|(a, c)| (a.as_slice(), *c))
    }
}

/// Check a raw tree against the signature and lexicon. The result category of
/// the root must be `S`; `sentence`/`hypothesis` wrappers are stripped.
pub fn typecheck(tree: &SynTree, lexicon: &Lexicon) -> Result<TypedTree, SyntaxError> {
    typecheck_with(tree, Signature::builtin(), lexicon)
}

/// [`typecheck`] against an explicit signature table.
pub fn typecheck_with(
    tree: &SynTree,
    signature: &Signature,
    lexicon: &Lexicon,
) -> Result<TypedTree, SyntaxError> {
    let inner = strip_wrapper(tree);
    let typed = check_node(inner, signature, lexicon)?;
    if typed.category != Category::S {
        return Err(SyntaxError::RootNotSentence(typed.category));
    }
    Ok(typed)
}

fn strip_wrapper(tree: &SynTree) -> &SynTree {
    if let SynTree::Node(children) = tree {
        if children.len() == 2 {
            if let SynTree::Leaf(head) = &children[0] {
                if head == "sentence" || head == "hypothesis" {
                    return &children[1];
                }
            }
        }
    }
    tree
}

fn check_node(
    tree: &SynTree,
    signature: &Signature,
    lexicon: &Lexicon,
) -> Result<TypedTree, SyntaxError> {
    let (head, args): (&str, &[SynTree]) = match tree {
        SynTree::Leaf(t) => (t.as_str(), &[]),
        SynTree::Node(children) => match &children[0] {
            SynTree::Leaf(t) => (t.as_str(), &children[1..]),
            other => {
                return Err(SyntaxError::UnknownConstructor(
                    other.head().unwrap_or("(...)").to_string(),
                ))
            }
        },
    };
    let (specs, result) = signature
        .get(head)
        .ok_or_else(|| SyntaxError::UnknownConstructor(head.to_string()))?;
    if specs.len() != args.len() {
        return Err(SyntaxError::ArityMismatch {
            constructor: head.to_string(),
            expected: specs.len(),
            got: args.len(),
        });
    }
    let mut children = Vec::new();
    let mut lexeme = None;
    for (index, (spec, arg)) in specs.iter().zip(args).enumerate() {
        match spec {
            ArgSpec::Lexeme(cat) => {
                let token = match arg {
                    SynTree::Leaf(t) => t.clone(),
                    SynTree::Node(_) => {
                        return Err(SyntaxError::CategoryMismatch {
                            constructor: head.to_string(),
                            index,
                            got: check_node(arg, signature, lexicon)?.category,
                            expected: *cat,
                        })
                    }
                };
                if !lexicon.has(&token, *cat) {
                    return Err(SyntaxError::UnknownLexeme(token));
                }
                lexeme = Some(token);
            }
            ArgSpec::Cat(cat) => {
                let typed = check_node(arg, signature, lexicon)?;
                if typed.category != *cat {
                    return Err(SyntaxError::CategoryMismatch {
                        constructor: head.to_string(),
                        index,
                        got: typed.category,
                        expected: *cat,
                    });
                }
                children.push(typed);
            }
        }
    }
    Ok(TypedTree { constructor: head.to_string(), category: result, children, lexeme })
}

#[cfg(test)]
mod tests {
    use super::*;

    const P279_P1: &str = r#"
sentence
(useCl past pPos
 (predVP
   (usePN (lexemePN "smith_PN"))
   (advVP
     (complSlash
      (slashV2a (lexemeV2 "write_V2"))
      (detCN (detQuant indefArt numSg)
        (useN (lexemeN "novel_N"))))
     (lexemeAdv "in_1991_Adv"))))
"#;

    #[test]
    fn reads_the_full_premise_dump() {
        let tree = read_tree(P279_P1).unwrap();
        // It is the sentence wrapper around a useCl node with 3 arguments.
        let SynTree::Node(top) = &tree else { panic!("expected node") };
        assert_eq!(top[0], SynTree::leaf("sentence"));
        let SynTree::Node(clause) = &top[1] else { panic!("expected node") };
        assert_eq!(clause[0], SynTree::leaf("useCl"));
        assert_eq!(clause.len(), 4);
        assert_eq!(clause[1], SynTree::leaf("past"));
        assert_eq!(clause[2], SynTree::leaf("pPos"));
    }

    #[test]
    fn reads_a_quoted_subterm() {
        let tree = read_tree(r#"(usePN (lexemePN "smith_PN"))"#).unwrap();
        assert_eq!(
            tree,
            SynTree::Node(vec![
                SynTree::leaf("usePN"),
                SynTree::Node(vec![SynTree::leaf("lexemePN"), SynTree::leaf("smith_PN")]),
            ])
        );
    }

    #[test]
    fn unbalanced_input_is_rejected() {
        assert!(matches!(read_tree("(useCl past"), Err(SyntaxError::UnbalancedParens)));
        assert!(matches!(read_tree("(useCl past))"), Err(SyntaxError::StrayToken(_))));
        assert!(matches!(read_tree(""), Err(SyntaxError::EmptyExpression)));
        assert!(matches!(read_tree("   \n"), Err(SyntaxError::EmptyExpression)));
        assert!(matches!(read_tree("(a) (b)"), Err(SyntaxError::StrayToken(_))));
    }

    #[test]
    fn whitespace_does_not_matter() {
        let compact = read_tree(r#"(usePN (lexemePN "smith_PN"))"#).unwrap();
        let spread = read_tree("(usePN\n   (lexemePN\n      \"smith_PN\"  ))").unwrap();
        assert_eq!(compact, spread);
    }

    #[test]
    fn print_read_round_trip() {
        let tree = read_tree(P279_P1).unwrap();
        let printed = print_tree(&tree);
        assert_eq!(read_tree(&printed).unwrap(), tree);
    }

    #[test]
    fn typechecks_the_premise_to_a_sentence() {
        let tree = read_tree(P279_P1).unwrap();
        let typed = typecheck(&tree, Lexicon::builtin()).unwrap();
        assert_eq!(typed.category, Category::S);
        assert_eq!(typed.constructor, "useCl");
        assert_eq!(typed.child(0).constructor, "past");
        assert_eq!(typed.child(1).constructor, "pPos");
    }

    #[test]
    fn noun_where_np_expected_is_a_category_mismatch() {
        let text = r#"(useCl past pPos (predVP (lexemeN "novel_N") (useV (lexemeV "walk_V"))))"#;
        let tree = read_tree(text).unwrap();
        let err = typecheck(&tree, Lexicon::builtin()).unwrap_err();
        assert!(matches!(
            err,
            SyntaxError::CategoryMismatch { got: Category::N, expected: Category::NP, .. }
        ));
    }

    #[test]
    fn missing_lexeme_is_reported_by_name() {
        let text = r#"(useCl past pPos (predVP (usePN (lexemePN "smith_PN"))
            (complSlash (slashV2a (lexemeV2 "swim_V2")) (usePN (lexemePN "smith_PN")))))"#;
        let tree = read_tree(text).unwrap();
        let err = typecheck(&tree, Lexicon::builtin()).unwrap_err();
        assert!(matches!(err, SyntaxError::UnknownLexeme(l) if l == "swim_V2"));
    }

    #[test]
    fn unknown_constructor_is_rejected() {
        let tree = read_tree("(mystery past pPos)").unwrap();
        let err = typecheck(&tree, Lexicon::builtin()).unwrap_err();
        assert!(matches!(err, SyntaxError::UnknownConstructor(c) if c == "mystery"));
    }
}
