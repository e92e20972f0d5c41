use super::lexer::{tokenize, Tok, Token};
use crate::error::{Error, ParseError, Result};
use crate::formula::{Formula, Term};
use crate::program::{
    DynamicProgram, InitSpec, InitTable, RuleBody, TableArg, TableEntry, Trigger, UpdateRule,
};
use crate::structure::{ConstBinding, ModKind, Role, Schema, SymbolKind};

pub(crate) struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub(crate) fn new(src: &str) -> std::result::Result<Cursor, ParseError> {
        Ok(Cursor {
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub(crate) fn peek_at(&self, ahead: usize) -> &Tok {
        let i = (self.pos + ahead).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub(crate) fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    pub(crate) fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn error_here(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError {
            line,
            col,
            msg: msg.into(),
        }
    }

    pub(crate) fn fail<T>(&self, msg: impl Into<String>) -> std::result::Result<T, ParseError> {
        Err(self.error_here(msg))
    }

    pub(crate) fn expect(&mut self, want: Tok) -> std::result::Result<(), ParseError> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            self.fail(format!("expected {}, found {}", want.describe(), self.peek().describe()))
        }
    }

    pub(crate) fn eat(&mut self, want: &Tok) -> bool {
        if self.peek() == want {
            self.next();
            true
        } else {
            false
        }
    }

    pub(crate) fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    pub(crate) fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.next();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect_word(&mut self, w: &str) -> std::result::Result<(), ParseError> {
        if self.eat_word(w) {
            Ok(())
        } else {
            self.fail(format!("expected `{w}`, found {}", self.peek().describe()))
        }
    }

    pub(crate) fn ident(&mut self) -> std::result::Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !s.contains('-') => {
                self.next();
                Ok(s)
            }
            Tok::Ident(s) => self.fail(format!("`-` is not allowed in identifier `{s}`")),
            other => self.fail(format!("expected identifier, found {}", other.describe())),
        }
    }

    pub(crate) fn number(&mut self) -> std::result::Result<u32, ParseError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.next();
                Ok(n)
            }
            other => self.fail(format!("expected number, found {}", other.describe())),
        }
    }

    pub(crate) fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }
}

const KEYWORDS: &[&str] = &[
    "program", "input", "aux", "builtin", "const", "query", "init", "on", "default", "fun",
    "true", "false", "ite",
];

struct Decl {
    name: String,
    kind: SymbolKind,
    arity: usize,
    role: Role,
    binding: Option<ConstBinding>,
}

/// Parses a `.dynp` program.
pub fn parse_program(src: &str) -> Result<DynamicProgram> {
    let mut c = Cursor::new(src)?;
    let mut p = ProgramParser {
        c: &mut c,
        decls: Vec::new(),
        schema: None,
    };
    p.program()
}

struct ProgramParser<'a> {
    c: &'a mut Cursor,
    decls: Vec<Decl>,
    schema: Option<Schema>,
}

type PResult<T> = std::result::Result<T, ParseError>;

impl ProgramParser<'_> {
    fn program(&mut self) -> Result<DynamicProgram> {
        self.c.expect_word("program")?;
        let name = match self.c.next() {
            Tok::Ident(s) => s,
            other => return Err(self.c.error_here(format!("expected program name, found {}", other.describe())).into()),
        };
        let mut query: Option<(String, (usize, usize))> = None;
        let mut init: Option<InitSpec> = None;
        let mut default_frame = false;
        let mut rules: Vec<UpdateRule> = Vec::new();
        loop {
            let at = self.c.here();
            match self.c.peek().clone() {
                Tok::Eof => break,
                Tok::Ident(w) => match w.as_str() {
                    "input" | "aux" | "builtin" => {
                        self.before_rules()?;
                        self.c.next();
                        let role = match w.as_str() {
                            "input" => Role::Input,
                            "aux" => Role::Aux,
                            _ => Role::Builtin,
                        };
                        self.symbol_block(role)?;
                    }
                    "const" => {
                        self.before_rules()?;
                        self.c.next();
                        self.const_list()?;
                    }
                    "query" => {
                        self.c.next();
                        if query.is_some() {
                            return Err(ParseError { line: at.0, col: at.1, msg: "duplicate `query`".into() }.into());
                        }
                        query = Some((self.c.ident()?, at));
                    }
                    "init" => {
                        self.c.next();
                        if init.is_some() {
                            return Err(ParseError { line: at.0, col: at.1, msg: "duplicate `init`".into() }.into());
                        }
                        init = Some(self.init_spec()?);
                    }
                    "default" => {
                        self.c.next();
                        self.c.expect_word("frame")?;
                        default_frame = true;
                    }
                    "on" => {
                        self.c.next();
                        self.on_block(&mut rules)?;
                    }
                    other => {
                        return Err(self.c.error_here(format!("unexpected `{other}` at top level")).into())
                    }
                },
                other => return Err(self.c.error_here(format!("unexpected {} at top level", other.describe())).into()),
            }
        }
        self.ensure_schema()?;
        let schema = self.schema.take().expect("schema built");
        let (query, qpos) = query.ok_or_else(|| self.c.error_here("missing `query` declaration"))?;
        match schema.get(&query) {
            Some(s) if s.kind == SymbolKind::Relation && s.role == Role::Aux => {}
            _ => {
                return Err(ParseError {
                    line: qpos.0,
                    col: qpos.1,
                    msg: format!("query `{query}` must be a declared aux relation"),
                }
                .into())
            }
        }
        let init = init.unwrap_or(InitSpec::Empty);
        DynamicProgram::new(
            &name,
            schema,
            rules,
            &query,
            init,
            default_frame,
        )
    }

    fn before_rules(&self) -> PResult<()> {
        if self.schema.is_some() {
            self.c.fail("declarations must come before the first `on` block")
        } else {
            Ok(())
        }
    }

    fn symbol_block(&mut self, role: Role) -> PResult<()> {
        self.c.expect(Tok::LBrace)?;
        while !self.c.eat(&Tok::RBrace) {
            let kind = if self.c.eat_word("fun") {
                SymbolKind::Function
            } else {
                SymbolKind::Relation
            };
            if kind == SymbolKind::Function && role == Role::Input {
                return self.c.fail("input symbols must be relations");
            }
            let name = self.symbol_name()?;
            self.c.expect(Tok::Slash)?;
            let arity = self.c.number()? as usize;
            self.decls.push(Decl {
                name,
                kind,
                arity,
                role,
                binding: None,
            });
            if !self.c.eat(&Tok::Comma) && *self.c.peek() != Tok::RBrace {
                return self.c.fail(format!("expected `,` or `}}`, found {}", self.c.peek().describe()));
            }
        }
        Ok(())
    }

    fn symbol_name(&mut self) -> PResult<String> {
        let name = self.c.ident()?;
        if KEYWORDS.contains(&name.as_str()) {
            return self.c.fail(format!("`{name}` is a keyword"));
        }
        if self.decls.iter().any(|d| d.name == name) {
            return self.c.fail(format!("duplicate symbol `{name}`"));
        }
        Ok(name)
    }

    fn const_list(&mut self) -> PResult<()> {
        loop {
            let name = self.symbol_name()?;
            let binding = if self.c.eat(&Tok::Eq) {
                if self.c.eat_word("last") {
                    Some(ConstBinding::Last)
                } else {
                    Some(ConstBinding::Index(self.c.number()?))
                }
            } else {
                None
            };
            self.decls.push(Decl {
                name,
                kind: SymbolKind::Constant,
                arity: 0,
                role: Role::Builtin,
                binding,
            });
            if !self.c.eat(&Tok::Comma) {
                return Ok(());
            }
        }
    }

    fn ensure_schema(&mut self) -> Result<()> {
        if self.schema.is_some() {
            return Ok(());
        }
        let mut b = Schema::builder();
        for role in [Role::Input, Role::Aux, Role::Builtin] {
            for d in self.decls.iter().filter(|d| d.role == role && d.kind != SymbolKind::Constant) {
                b = match d.kind {
                    SymbolKind::Relation => b.relation(&d.name, d.arity, d.role),
                    _ => b.function(&d.name, d.arity, d.role),
                };
            }
        }
        for d in self.decls.iter().filter(|d| d.kind == SymbolKind::Constant) {
            b = b.constant(&d.name, d.binding);
        }
        self.schema = Some(b.build()?);
        Ok(())
    }

    fn init_spec(&mut self) -> PResult<InitSpec> {
        let word = self.c.ident()?;
        Ok(match word.as_str() {
            "empty" => InitSpec::Empty,
            "oracle" => {
                if self.c.eat_word("table") {
                    InitSpec::Oracle {
                        base: Some(self.init_table()?),
                    }
                } else {
                    InitSpec::Oracle { base: None }
                }
            }
            "table" => InitSpec::Table(self.init_table()?),
            "builtin" => InitSpec::Builtin(self.c.ident()?),
            other => return self.c.fail(format!("unknown init kind `{other}` (expected empty, oracle, table or builtin)")),
        })
    }

    fn table_arg(&mut self) -> PResult<TableArg> {
        match self.c.peek().clone() {
            Tok::Num(n) => {
                self.c.next();
                Ok(TableArg::Elem(n))
            }
            Tok::Star => {
                self.c.next();
                Ok(TableArg::Any)
            }
            Tok::Ident(w) if w == "last" => {
                self.c.next();
                Ok(TableArg::Last)
            }
            Tok::Ident(_) => Ok(TableArg::Const(self.c.ident()?)),
            other => self.c.fail(format!("expected element, `*`, `last` or constant, found {}", other.describe())),
        }
    }

    fn init_table(&mut self) -> PResult<InitTable> {
        self.c.expect(Tok::LBrace)?;
        let mut entries = Vec::new();
        while !self.c.eat(&Tok::RBrace) {
            let name = self.c.ident()?;
            let mut args = Vec::new();
            if self.c.eat(&Tok::LParen) {
                while !self.c.eat(&Tok::RParen) {
                    args.push(self.table_arg()?);
                    if !self.c.eat(&Tok::Comma) && *self.c.peek() != Tok::RParen {
                        return self.c.fail(format!("expected `,` or `)`, found {}", self.c.peek().describe()));
                    }
                }
            }
            if self.c.eat(&Tok::Eq) {
                let value = self.table_arg()?;
                entries.push(TableEntry::Value { fun: name, args, value });
            } else {
                entries.push(TableEntry::Fact { rel: name, args });
            }
            self.c.eat(&Tok::Comma);
        }
        Ok(InitTable::new(entries))
    }

    fn on_block(&mut self, rules: &mut Vec<UpdateRule>) -> Result<()> {
        self.ensure_schema()?;
        let kind = match self.c.ident()?.as_str() {
            "insert" => ModKind::Ins,
            "delete" => ModKind::Del,
            other => return Err(self.c.error_here(format!("expected `insert` or `delete`, found `{other}`")).into()),
        };
        let rel_pos = self.c.here();
        let rel = self.c.ident()?;
        let schema = self.schema.as_ref().expect("schema built");
        match schema.get(&rel) {
            Some(s) if s.role == Role::Input => {}
            _ => {
                return Err(ParseError {
                    line: rel_pos.0,
                    col: rel_pos.1,
                    msg: format!("`{rel}` is not an input relation"),
                }
                .into())
            }
        }
        let params = self.var_list()?;
        self.c.expect(Tok::Colon)?;
        let trigger = Trigger { kind, rel };
        while self.at_rule_head() {
            let rule = self.rule(&trigger, &params)?;
            rules.push(rule);
        }
        Ok(())
    }

    fn var_list(&mut self) -> PResult<Vec<String>> {
        let mut vars = Vec::new();
        if self.c.eat(&Tok::LParen) {
            while !self.c.eat(&Tok::RParen) {
                let v = self.c.ident()?;
                if KEYWORDS.contains(&v.as_str()) {
                    return self.c.fail(format!("`{v}` is a keyword"));
                }
                vars.push(v);
                if !self.c.eat(&Tok::Comma) && *self.c.peek() != Tok::RParen {
                    return self.c.fail(format!("expected `,` or `)`, found {}", self.c.peek().describe()));
                }
            }
        }
        Ok(vars)
    }

    /// `Name:`, `Name(...):` or the `:=` forms.
    fn at_rule_head(&self) -> bool {
        match self.c.peek() {
            Tok::Ident(w) if w == "on" || w == "default" || w == "query" || w == "init" => false,
            Tok::Ident(_) => {
                let mut i = 1;
                if *self.c.peek_at(1) == Tok::LParen {
                    i += 1;
                    loop {
                        match self.c.peek_at(i) {
                            Tok::Ident(_) | Tok::Comma => i += 1,
                            Tok::RParen => {
                                i += 1;
                                break;
                            }
                            _ => return false,
                        }
                    }
                }
                matches!(self.c.peek_at(i), Tok::Colon | Tok::Assign)
            }
            _ => false,
        }
    }

    fn rule(&mut self, trigger: &Trigger, params: &[String]) -> Result<UpdateRule> {
        let head_pos = self.c.here();
        let target = self.c.ident()?;
        let vars = self.var_list()?;
        let is_term = match self.c.next() {
            Tok::Assign => true,
            Tok::Colon => false,
            _ => unreachable!("checked by at_rule_head"),
        };
        let schema = self.schema.as_ref().expect("schema built");
        let head_err = |msg: String| -> Error {
            ParseError {
                line: head_pos.0,
                col: head_pos.1,
                msg,
            }
            .into()
        };
        let sym = schema
            .get(&target)
            .ok_or_else(|| head_err(format!("unknown symbol `{target}`")))?;
        if sym.role != Role::Aux {
            return Err(head_err(format!("`{target}` is not an aux symbol")));
        }
        match (sym.kind, is_term) {
            (SymbolKind::Relation, true) => {
                return Err(head_err(format!("`{target}` is a relation; use `:` and a formula")))
            }
            (SymbolKind::Function, false) => {
                return Err(head_err(format!("`{target}` is a function; use `:=` and a term")))
            }
            _ => {}
        }
        if vars.len() != sym.arity {
            return Err(head_err(format!(
                "`{target}` has arity {}, head binds {}",
                sym.arity,
                vars.len()
            )));
        }
        let scope: Vec<String> = params.iter().chain(vars.iter()).cloned().collect();
        for (i, v) in scope.iter().enumerate() {
            if scope[..i].contains(v) {
                return Err(head_err(format!("variable `{v}` bound twice")));
            }
        }
        let mut ep = ExprParser {
            c: self.c,
            schema,
            scope: &scope,
        };
        let body = if is_term {
            RuleBody::Term(ep.term()?)
        } else {
            RuleBody::Formula(ep.formula()?)
        };
        Ok(UpdateRule {
            target,
            trigger: trigger.clone(),
            params: params.to_vec(),
            vars,
            body,
        })
    }
}

/// Formulas and terms over a fixed schema and variable scope.
pub(crate) struct ExprParser<'a, 'b> {
    pub(crate) c: &'a mut Cursor,
    pub(crate) schema: &'b Schema,
    pub(crate) scope: &'b [String],
}

impl ExprParser<'_, '_> {
    pub(crate) fn formula(&mut self) -> PResult<Formula> {
        let mut f = self.conj()?;
        while self.c.eat(&Tok::Or) {
            let g = self.conj()?;
            f = Formula::or(f, g);
        }
        Ok(f)
    }

    fn conj(&mut self) -> PResult<Formula> {
        let mut f = self.unary()?;
        while self.c.eat(&Tok::And) {
            let g = self.unary()?;
            f = Formula::and(f, g);
        }
        Ok(f)
    }

    fn unary(&mut self) -> PResult<Formula> {
        if self.c.eat(&Tok::Not) {
            return Ok(Formula::not(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Formula> {
        match self.c.peek().clone() {
            Tok::LParen => {
                self.c.next();
                let f = self.formula()?;
                self.c.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(w) if w == "true" => {
                self.c.next();
                Ok(Formula::True)
            }
            Tok::Ident(w) if w == "false" => {
                self.c.next();
                Ok(Formula::False)
            }
            Tok::Ident(w)
                if !self.scope.contains(&w)
                    && self.schema.get(&w).is_some_and(|s| s.kind == SymbolKind::Relation) =>
            {
                let at = self.c.here();
                self.c.next();
                let arity = self.schema.get(&w).map(|s| s.arity).unwrap_or(0);
                let args = if *self.c.peek() == Tok::LParen {
                    self.args()?
                } else {
                    Vec::new()
                };
                if args.len() != arity {
                    return Err(ParseError {
                        line: at.0,
                        col: at.1,
                        msg: format!("`{w}` has arity {arity}, got {} arguments", args.len()),
                    });
                }
                Ok(Formula::Atom(w, args))
            }
            _ => {
                let a = self.term()?;
                if self.c.eat(&Tok::Eq) {
                    Ok(Formula::eq(a, self.term()?))
                } else if self.c.eat(&Tok::Ne) {
                    Ok(Formula::ne(a, self.term()?))
                } else {
                    self.c.fail(format!(
                        "expected `=` or `!=` after term, found {}",
                        self.c.peek().describe()
                    ))
                }
            }
        }
    }

    fn args(&mut self) -> PResult<Vec<Term>> {
        self.c.expect(Tok::LParen)?;
        let mut args = Vec::new();
        while !self.c.eat(&Tok::RParen) {
            args.push(self.term()?);
            if !self.c.eat(&Tok::Comma) && *self.c.peek() != Tok::RParen {
                return self.c.fail(format!("expected `,` or `)`, found {}", self.c.peek().describe()));
            }
        }
        Ok(args)
    }

    pub(crate) fn term(&mut self) -> PResult<Term> {
        let at = self.c.here();
        let name = match self.c.peek().clone() {
            Tok::Ident(w) => w,
            other => return self.c.fail(format!("expected term, found {}", other.describe())),
        };
        let err = |msg: String| ParseError {
            line: at.0,
            col: at.1,
            msg,
        };
        if name == "ite" && *self.c.peek_at(1) == Tok::LParen {
            self.c.next();
            self.c.next();
            let cond = self.formula()?;
            self.c.expect(Tok::Comma)?;
            let a = self.term()?;
            self.c.expect(Tok::Comma)?;
            let b = self.term()?;
            self.c.expect(Tok::RParen)?;
            return Ok(Term::ite(cond, a, b));
        }
        self.c.ident()?;
        if self.scope.contains(&name) {
            return Ok(Term::Var(name));
        }
        match self.schema.get(&name) {
            Some(s) if s.kind == SymbolKind::Constant => Ok(Term::Const(name)),
            Some(s) if s.kind == SymbolKind::Function => {
                let args = if *self.c.peek() == Tok::LParen {
                    self.args()?
                } else {
                    Vec::new()
                };
                if args.len() != s.arity {
                    return Err(err(format!("`{name}` has arity {}, got {} arguments", s.arity, args.len())));
                }
                Ok(Term::App(name, args))
            }
            Some(_) => Err(err(format!("relation `{name}` used as a term"))),
            None => Err(err(format!("unbound variable `{name}`"))),
        }
    }
}

/// Parses a standalone formula over `schema` with the given variables.
pub fn parse_formula(src: &str, schema: &Schema, vars: &[&str]) -> Result<Formula> {
    let mut c = Cursor::new(src)?;
    let scope: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
    let mut ep = ExprParser {
        c: &mut c,
        schema,
        scope: &scope,
    };
    let f = ep.formula()?;
    if !c.at_eof() {
        return Err(c.error_here(format!("unexpected {}", c.peek().describe())).into());
    }
    Ok(f)
}
