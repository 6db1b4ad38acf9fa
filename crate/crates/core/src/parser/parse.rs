use crate::diag::{Code, Diagnostic, Span};
use crate::model::{FlowKind, Region, Side, TableKind};

use super::ast::*;
use super::lexer::{Token, TokenKind};

const ITEM_KEYWORDS: &[&str] = &["node", "data", "edge", "detail", "table", "embedding", "extend"];
const MAX_NESTING: usize = 32;
const TERM_PUNCT: &[&str] = &["^", "{", "}", "(", ")", "[", "]", ",", ";"];

type PResult<T> = Result<T, ()>;

struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
    diags: Vec<Diagnostic>,
    nesting: usize,
}

/// Parses a token stream (as produced by `tokenize`, ending in `Eof`).
/// Syntax errors are reported as E002; the parser resynchronizes at
/// declaration boundaries so several errors surface in one run.
pub fn parse(tokens: &[Token]) -> Result<SourceAst, Vec<Diagnostic>> {
    assert!(
        tokens.last().is_some_and(|t| t.kind == TokenKind::Eof),
        "token stream must end with Eof"
    );
    let mut p = Parser {
        toks: tokens,
        pos: 0,
        diags: Vec::new(),
        nesting: 0,
    };
    let ast = p.unit();
    match ast {
        Some(ast) if p.diags.is_empty() => Ok(ast),
        _ => {
            if p.diags.is_empty() {
                let span = p.peek().span;
                p.diags.push(Diagnostic::at(Code::E002, span, "malformed source"));
            }
            Err(p.diags)
        }
    }
}

fn describe(tok: &Token) -> String {
    match tok.kind {
        TokenKind::Eof => "end of input".to_string(),
        TokenKind::Keyword => format!("keyword `{}`", tok.text),
        _ => format!("`{}`", tok.text),
    }
}

fn join(a: Span, b: Span) -> Span {
    let end = (b.offset + b.len as usize).max(a.offset + a.len as usize);
    Span::new(a.offset, a.line, a.col, (end - a.offset) as u32)
}

impl<'t> Parser<'t> {
    fn peek(&self) -> &'t Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, n: usize) -> &'t Token {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)]
    }

    fn advance(&mut self) -> &'t Token {
        let t = &self.toks[self.pos];
        if t.kind != TokenKind::Eof {
            self.pos += 1;
        }
        t
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn at_punct(&self, p: &str) -> bool {
        self.peek().is(TokenKind::Punct, p)
    }

    fn at_kw(&self, k: &str) -> bool {
        self.peek().is(TokenKind::Keyword, k)
    }

    fn error<T>(&mut self, expected: &[&str]) -> PResult<T> {
        let tok = self.peek();
        let list = expected.join(", ");
        self.diags.push(Diagnostic::at(
            Code::E002,
            tok.span,
            format!("expected {list}; found {}", describe(tok)),
        ));
        Err(())
    }

    fn error_msg<T>(&mut self, span: Span, msg: String) -> PResult<T> {
        self.diags.push(Diagnostic::at(Code::E002, span, msg));
        Err(())
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<Span> {
        if self.at_punct(p) {
            Ok(self.advance().span)
        } else {
            self.error(&[&format!("`{p}`")])
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<Span> {
        if self.at_kw(k) {
            Ok(self.advance().span)
        } else {
            self.error(&[&format!("`{k}`")])
        }
    }

    fn expect_ident(&mut self) -> PResult<Ident> {
        if self.peek().kind == TokenKind::Ident {
            let t = self.advance();
            Ok(Spanned::new(t.text.clone(), t.span))
        } else {
            self.error(&["identifier"])
        }
    }

    fn expect_string(&mut self) -> PResult<String> {
        if self.peek().kind == TokenKind::Str {
            Ok(self.advance().string_value())
        } else {
            self.error(&["string"])
        }
    }

    fn unit(&mut self) -> Option<SourceAst> {
        let header = self.header();
        if header.is_err() {
            while !self.at_kw("diagram") && self.peek().kind != TokenKind::Eof {
                self.advance();
            }
        }
        let diagram = self.diagram();
        if diagram.is_ok() && self.peek().kind != TokenKind::Eof {
            let _ = self.error::<()>(&["end of input"]);
        }
        let (version, dialects) = header.ok()?;
        Some(SourceAst {
            version,
            dialects,
            diagram: diagram.ok()?,
        })
    }

    fn header(&mut self) -> PResult<(Spanned<String>, Vec<Ident>)> {
        self.expect_kw("dial")?;
        if self.peek().kind != TokenKind::Number {
            return self.error(&["version number"]);
        }
        let v = self.advance();
        let version = Spanned::new(v.text.clone(), v.span);
        self.expect_kw("dialect")?;
        let mut dialects = vec![self.expect_ident()?];
        while self.eat_punct(",") {
            dialects.push(self.expect_ident()?);
        }
        Ok((version, dialects))
    }

    fn diagram(&mut self) -> PResult<DiagramDecl> {
        let start = self.expect_kw("diagram")?;
        let name = self.expect_string()?;
        let placement = self.placement()?;
        // A missing `{` is reported but parsing continues as if present.
        if !self.eat_punct("{") {
            let _ = self.error::<()>(&["`{`"]);
        }
        let items = self.items();
        let end = self.expect_punct("}")?;
        Ok(DiagramDecl {
            name,
            placement,
            items,
            span: join(start, end),
        })
    }

    fn items(&mut self) -> Vec<Item> {
        let mut items = Vec::new();
        loop {
            let tok = self.peek();
            if tok.kind == TokenKind::Eof || tok.is(TokenKind::Punct, "}") {
                break;
            }
            let start = self.pos;
            let item = match (tok.kind, tok.text.as_str()) {
                (TokenKind::Keyword, "node") => self.node().map(Item::Node),
                (TokenKind::Keyword, "data") => self.data().map(Item::Data),
                (TokenKind::Keyword, "edge") => self.edge().map(Item::Edge),
                (TokenKind::Keyword, "detail") => self.detail().map(Item::Detail),
                (TokenKind::Keyword, "table") => self.table().map(Item::Table),
                (TokenKind::Keyword, "embedding") => self.embedding().map(Item::Embedding),
                (TokenKind::Keyword, "extend") => self.extend().map(Item::Extend),
                _ => self.error(&[
                    "`node`",
                    "`data`",
                    "`edge`",
                    "`detail`",
                    "`table`",
                    "`embedding`",
                    "`extend`",
                    "`}`",
                ]),
            };
            match item {
                Ok(item) => items.push(item),
                Err(()) => self.sync(start),
            }
        }
        items
    }

    /// Skips to the next declaration keyword or unmatched `}`.
    fn sync(&mut self, item_start: usize) {
        if self.pos == item_start {
            self.advance();
        }
        let mut depth = 0usize;
        loop {
            let tok = self.peek();
            match (tok.kind, tok.text.as_str()) {
                (TokenKind::Eof, _) => return,
                (TokenKind::Keyword, k) if depth == 0 && ITEM_KEYWORDS.contains(&k) => return,
                (TokenKind::Punct, "}") if depth == 0 => return,
                (TokenKind::Punct, "}") => depth -= 1,
                (TokenKind::Punct, "{") => depth += 1,
                _ => {}
            }
            self.advance();
        }
    }

    /// Skips to just past the `}` closing the current block.
    fn skip_block(&mut self) {
        let mut depth = 0usize;
        loop {
            let tok = self.advance();
            match (tok.kind, tok.text.as_str()) {
                (TokenKind::Eof, _) => return,
                (TokenKind::Punct, "}") if depth == 0 => return,
                (TokenKind::Punct, "}") => depth -= 1,
                (TokenKind::Punct, "{") => depth += 1,
                _ => {}
            }
        }
    }

    fn placement(&mut self) -> PResult<Option<Spanned<Region>>> {
        if !self.at_punct("@") {
            return Ok(None);
        }
        let at = self.advance().span;
        self.region(at).map(Some)
    }

    fn region(&mut self, at: Span) -> PResult<Spanned<Region>> {
        let tok = self.peek();
        match Region::parse(&tok.text).filter(|_| tok.kind == TokenKind::Ident) {
            Some(r) => {
                self.advance();
                Ok(Spanned::new(r, join(at, tok.span)))
            }
            None => self.error(&["`top_left`", "`top_right`", "`bottom_left`", "`bottom_right`"]),
        }
    }

    fn value(&mut self) -> PResult<String> {
        let tok = self.peek();
        match tok.kind {
            TokenKind::Ident | TokenKind::Number => Ok(self.advance().text.clone()),
            TokenKind::Str => Ok(self.advance().string_value()),
            _ => self.error(&["identifier", "number", "string"]),
        }
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        let mut params = Vec::new();
        if !self.eat_punct("(") {
            return Ok(params);
        }
        if self.eat_punct(")") {
            return Ok(params);
        }
        loop {
            let key = self.expect_ident()?;
            self.expect_punct("=")?;
            let value = self.value()?;
            params.push(Param {
                key: key.value,
                value,
                span: join(key.span, self.prev_span()),
            });
            if self.eat_punct(")") {
                return Ok(params);
            }
            if !self.at_punct(",") {
                return self.error(&["`,`", "`)`"]);
            }
            self.advance();
        }
    }

    fn perf(&mut self) -> PResult<Vec<PerfItem>> {
        let mut items = Vec::new();
        if !self.at_kw("perf") {
            return Ok(items);
        }
        self.advance();
        self.expect_punct("(")?;
        loop {
            let metric = self.expect_ident()?;
            self.expect_punct("=")?;
            if self.peek().kind != TokenKind::Number {
                return self.error(&["number"]);
            }
            let value = self.advance().text.clone();
            self.expect_punct("@")?;
            let corpus = self.expect_string()?;
            items.push(PerfItem {
                metric: metric.value,
                value,
                corpus,
                span: join(metric.span, self.prev_span()),
            });
            if self.eat_punct(")") {
                return Ok(items);
            }
            if !self.at_punct(",") {
                return self.error(&["`,`", "`)`"]);
            }
            self.advance();
        }
    }

    fn node(&mut self) -> PResult<NodeDecl> {
        let start = self.expect_kw("node")?;
        let id = self.expect_ident()?;
        self.expect_punct(":")?;
        let code = self.expect_ident()?;
        let params = self.params()?;
        let label = match self.peek().kind {
            TokenKind::Str => Some(self.advance().string_value()),
            _ => None,
        };
        let perf = self.perf()?;
        let placement = self.placement()?;
        Ok(NodeDecl {
            id,
            code,
            params,
            label,
            perf,
            placement,
            span: join(start, self.prev_span()),
        })
    }

    /// Collects an adjacent run of term tokens. Whitespace is allowed only
    /// inside brackets.
    fn term(&mut self) -> PResult<Spanned<String>> {
        let mut text = String::new();
        let mut depth = 0usize;
        let mut prev_end: Option<usize> = None;
        let first = self.peek().span;
        loop {
            let tok = self.peek();
            let termish = match tok.kind {
                TokenKind::Ident | TokenKind::Number => true,
                TokenKind::Punct => TERM_PUNCT.contains(&tok.text.as_str()),
                _ => false,
            };
            if !termish {
                break;
            }
            if depth == 0 {
                if prev_end.is_some_and(|e| e != tok.span.offset) {
                    break;
                }
                if matches!(tok.text.as_str(), "," | ";" | ")" | "]" | "}") {
                    break;
                }
            }
            match tok.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth -= 1,
                _ => {}
            }
            text.push_str(&tok.text);
            prev_end = Some(tok.end());
            self.advance();
        }
        if text.is_empty() {
            return self.error(&["data term"]);
        }
        Ok(Spanned::new(text, join(first, self.prev_span())))
    }

    fn data(&mut self) -> PResult<DataDecl> {
        let start = self.expect_kw("data")?;
        let id = self.expect_ident()?;
        self.expect_punct(":")?;
        let term = self.term()?;
        let mut tag = None;
        if self.at_punct("@") && self.peek_at(1).kind == TokenKind::Ident {
            tag = match self.peek_at(1).text.as_str() {
                "gold" => Some(ResourceTag::Gold),
                "kb" => Some(ResourceTag::Kb),
                "kbfn" => Some(ResourceTag::Kbfn),
                "dataset" => {
                    self.advance();
                    self.advance();
                    self.expect_punct("(")?;
                    let name = self.expect_string()?;
                    self.expect_punct(")")?;
                    Some(ResourceTag::Dataset(name))
                }
                _ => None,
            };
            if matches!(tag, Some(ResourceTag::Gold | ResourceTag::Kb | ResourceTag::Kbfn)) {
                self.advance();
                self.advance();
            }
        }
        let label = match self.peek().kind {
            TokenKind::Str => Some(self.advance().string_value()),
            _ => None,
        };
        let placement = if self.at_punct("@") {
            let at = self.advance().span;
            let tok = self.peek();
            if tok.kind == TokenKind::Ident && Region::parse(&tok.text).is_none() {
                return self.error(&[
                    "`@dataset`",
                    "`@gold`",
                    "`@kb`",
                    "`@kbfn`",
                    "`top_left`",
                    "`top_right`",
                    "`bottom_left`",
                    "`bottom_right`",
                ]);
            }
            Some(self.region(at)?)
        } else {
            None
        };
        Ok(DataDecl {
            id,
            term,
            tag,
            label,
            placement,
            span: join(start, self.prev_span()),
        })
    }

    fn port_ref(&mut self) -> PResult<PortRef> {
        let node = self.expect_ident()?;
        let port = if self.eat_punct(".") {
            Some(self.expect_ident()?)
        } else {
            None
        };
        Ok(PortRef { node, port })
    }

    fn edge(&mut self) -> PResult<EdgeDecl> {
        let start = self.expect_kw("edge")?;
        let source = self.port_ref()?;
        let tok = self.peek();
        let flow = match FlowKind::from_arrow(&tok.text).filter(|_| tok.kind == TokenKind::Arrow) {
            Some(f) => f,
            None => return self.error(&["`->`", "`<->`", "`|->`", "`?>`", "`-o`", "`~>`"]),
        };
        self.advance();
        let target = self.port_ref()?;
        let term = if self.at_kw("as") {
            self.advance();
            Some(self.term()?)
        } else {
            None
        };
        Ok(EdgeDecl {
            source,
            flow,
            target,
            term,
            span: join(start, self.prev_span()),
        })
    }

    fn detail(&mut self) -> PResult<DetailDecl> {
        let start = self.expect_kw("detail")?;
        let id = self.expect_ident()?;
        self.expect_kw("for")?;
        let owner = self.expect_ident()?;
        let mut entry = None;
        let mut exit = None;
        for p in self.params()? {
            let side = Side::parse(&p.value);
            match (p.key.as_str(), side) {
                ("entry", Some(s)) => entry = Some(s),
                ("exit", Some(s)) => exit = Some(s),
                ("entry" | "exit", None) => {
                    return self.error_msg(
                        p.span,
                        format!("expected one of left, right, top, bottom; found `{}`", p.value),
                    )
                }
                _ => return self.error_msg(p.span, format!("expected `entry` or `exit`; found `{}`", p.key)),
            }
        }
        let open = self.expect_punct("{")?;
        if self.nesting >= MAX_NESTING {
            self.skip_block();
            return self.error_msg(open, format!("detail blocks nest deeper than {MAX_NESTING} levels"));
        }
        self.nesting += 1;
        let items = self.items();
        self.nesting -= 1;
        let end = self.expect_punct("}")?;
        Ok(DetailDecl {
            id,
            owner,
            entry,
            exit,
            items,
            span: join(start, end),
        })
    }

    fn table(&mut self) -> PResult<TableDecl> {
        let start = self.expect_kw("table")?;
        let id = self.expect_ident()?;
        let kind = if self.eat_punct(":") {
            let tok = self.peek();
            match TableKind::parse(&tok.text).filter(|_| tok.kind == TokenKind::Ident) {
                Some(k) => {
                    self.advance();
                    Some(k)
                }
                None => return self.error(&["`hyperparams`", "`results`", "`freeform`"]),
            }
        } else {
            None
        };
        let placement = self.placement()?;
        self.expect_punct("{")?;
        let mut rows = Vec::new();
        let mut ok = true;
        while !self.at_punct("}") && self.peek().kind != TokenKind::Eof {
            let row = (|| -> PResult<(String, String)> {
                let k = self.expect_string()?;
                self.expect_punct(":")?;
                let v = self.expect_string()?;
                self.expect_punct(";")?;
                Ok((k, v))
            })();
            match row {
                Ok(r) => rows.push(r),
                Err(()) => {
                    ok = false;
                    self.skip_block();
                    break;
                }
            }
        }
        if !ok {
            return Err(());
        }
        let end = self.expect_punct("}")?;
        Ok(TableDecl {
            id,
            kind,
            placement,
            rows,
            span: join(start, end),
        })
    }

    fn embedding(&mut self) -> PResult<EmbeddingDecl> {
        let start = self.expect_kw("embedding")?;
        let id = self.expect_ident()?;
        self.expect_punct("(")?;
        let key = self.expect_ident()?;
        if key.value != "dim" {
            return self.error_msg(key.span, format!("expected `dim`; found `{}`", key.value));
        }
        self.expect_punct("=")?;
        let tok = self.peek();
        if tok.kind != TokenKind::Number || !tok.text.bytes().all(|b| b.is_ascii_digit()) {
            return self.error(&["non-negative integer"]);
        }
        self.advance();
        let dim = Spanned::new(tok.text.clone(), tok.span);
        self.expect_punct(")")?;
        let label = match self.peek().kind {
            TokenKind::Str => Some(self.advance().string_value()),
            _ => None,
        };
        Ok(EmbeddingDecl {
            id,
            dim,
            label,
            span: join(start, self.prev_span()),
        })
    }

    fn extend(&mut self) -> PResult<ExtendDecl> {
        let start = self.expect_kw("extend")?;
        let tok = self.peek();
        let kind = match (tok.kind, tok.text.as_str()) {
            (TokenKind::Ident, "symbol") => ExtendKind::Symbol,
            (TokenKind::Ident, "task") => ExtendKind::Task,
            _ => return self.error(&["`symbol`", "`task`"]),
        };
        self.advance();
        let id = self.expect_ident()?;
        self.expect_punct("{")?;
        let mut entries = Vec::new();
        while !self.at_punct("}") && self.peek().kind != TokenKind::Eof {
            let entry = (|| -> PResult<Entry> {
                let key = self.expect_ident()?;
                self.expect_punct(":")?;
                let tok = self.peek();
                let value = match tok.kind {
                    TokenKind::Str => Value::Str(tok.string_value()),
                    TokenKind::Ident => Value::Ident(tok.text.clone()),
                    TokenKind::Number => Value::Number(tok.text.clone()),
                    TokenKind::Punct if tok.text == "*" => Value::Star,
                    _ => return self.error(&["string", "identifier", "number", "`*`"]),
                };
                self.advance();
                self.expect_punct(";")?;
                Ok(Entry {
                    key: key.value,
                    value,
                    span: join(key.span, self.prev_span()),
                })
            })();
            match entry {
                Ok(e) => entries.push(e),
                Err(()) => {
                    self.skip_block();
                    return Err(());
                }
            }
        }
        let end = self.expect_punct("}")?;
        Ok(ExtendDecl {
            kind,
            id,
            entries,
            span: join(start, end),
        })
    }
}
