//! Recursive-descent parser for component definitions (`.arc`), delta models
//! (`.delta`), product configurations (`.deltacfg`) and type hierarchies
//! (`.types`).
//!
//! Keywords are contextual: the lexer produces plain names and the parser
//! decides what a name means from its position. Unnamed ports and
//! subcomponents are materialised with their implicit name during parsing, so
//! elaborated models always carry explicit names. Duplicate port,
//! subcomponent and parameter declarations are accepted here and reported by
//! the wellformedness checks.

use std::sync::Arc;

use crate::delta::{DeltaModel, ElementKind, ModificationOp, OpScope};
use crate::diag::{Code, Diagnostic, Loc};
use crate::lexer::{lex, Token, TokenKind};
use crate::model::{
    implicit_name, AutoconnectMode, ComponentDefinition, ConfigArg, ConnectorDecl, Direction,
    ParameterDecl, PortDecl, PortRef, SubcomponentDecl, TypeHierarchy,
};
use crate::order::{OrderConstraint, ProductConfiguration};

/// Parses one component definition; the entire text must be consumed.
pub fn parse_component_text(text: &str, file: &str) -> Result<ComponentDefinition, Diagnostic> {
    let mut p = Parser::new(text, file)?;
    let c = p.component()?;
    p.expect_eof()?;
    Ok(c)
}

/// Parses one delta model; the entire text must be consumed.
pub fn parse_delta_text(text: &str, file: &str) -> Result<DeltaModel, Diagnostic> {
    let mut p = Parser::new(text, file)?;
    let d = p.delta()?;
    p.expect_eof()?;
    Ok(d)
}

/// Parses one product configuration; the entire text must be consumed.
pub fn parse_config_text(text: &str, file: &str) -> Result<ProductConfiguration, Diagnostic> {
    let mut p = Parser::new(text, file)?;
    let c = p.config()?;
    p.expect_eof()?;
    Ok(c)
}

/// Parses a type hierarchy file: one `type Name [extends Name];` per
/// declaration. Forward references are allowed; cyclic `extends` chains are
/// rejected.
pub fn parse_types_text(text: &str, file: &str) -> Result<TypeHierarchy, Diagnostic> {
    let mut p = Parser::new(text, file)?;
    let mut h = TypeHierarchy::new();
    while !p.at_eof() {
        let loc = p.expect_keyword("type")?;
        let (name, _) = p.expect_name("type name")?;
        h.declare(&name);
        if p.eat_keyword("extends") {
            let (sup, _) = p.expect_name("supertype name")?;
            h.add_edge(&name, &sup, &loc)?;
        }
        p.expect(&TokenKind::Semi)?;
    }
    Ok(h)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(text: &str, file: &str) -> Result<Self, Diagnostic> {
        let file: Arc<str> = Arc::from(file);
        Ok(Parser { tokens: lex(text, &file)?, pos: 0 })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn at_eof(&self) -> bool {
        self.peek().kind == TokenKind::Eof
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::error(Code::ParseSyntax, self.peek().loc.clone(), msg)
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Name(n) if n == kw)
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<Loc, Diagnostic> {
        if self.at_keyword(kw) {
            Ok(self.advance().loc)
        } else {
            Err(self.error_here(format!("expected `{kw}`, found {}", self.peek().kind.describe())))
        }
    }

    fn expect_name(&mut self, what: &str) -> Result<(String, Loc), Diagnostic> {
        match &self.peek().kind {
            TokenKind::Name(n) => {
                let n = n.clone();
                Ok((n, self.advance().loc))
            }
            other => Err(self.error_here(format!("expected {what}, found {}", other.describe()))),
        }
    }

    fn expect(&mut self, kind: &TokenKind) -> Result<Loc, Diagnostic> {
        if &self.peek().kind == kind {
            Ok(self.advance().loc)
        } else {
            Err(self.error_here(format!(
                "expected {}, found {}",
                kind.describe(),
                self.peek().kind.describe()
            )))
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if &self.peek().kind == kind {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_eof(&mut self) -> Result<(), Diagnostic> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.error_here(format!("expected end of file, found {}", self.peek().kind.describe())))
        }
    }

    // ----- components -----

    fn component(&mut self) -> Result<ComponentDefinition, Diagnostic> {
        let loc = self.expect_keyword("component")?;
        let (name, _) = self.expect_name("component name")?;
        let mut c = ComponentDefinition::new(name, loc);
        if self.eat(&TokenKind::LParen) {
            loop {
                let (pname, ploc) = self.expect_name("parameter name")?;
                c.params.push(ParameterDecl { name: pname, loc: ploc });
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
            self.expect(&TokenKind::RParen)?;
        }
        self.expect(&TokenKind::LBrace)?;
        let mut autoconnect_seen = false;
        while !self.eat(&TokenKind::RBrace) {
            if self.at_keyword("autoconnect") {
                let loc = self.advance().loc;
                if autoconnect_seen {
                    return Err(Diagnostic::error(
                        Code::ParseSyntax,
                        loc,
                        "duplicate `autoconnect` statement: a component has exactly one mode",
                    ));
                }
                autoconnect_seen = true;
                c.autoconnect = self.autoconnect_mode()?;
                self.expect(&TokenKind::Semi)?;
            } else if self.at_keyword("port") {
                self.advance();
                loop {
                    c.ports.push(self.port_decl()?);
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
                self.expect(&TokenKind::Semi)?;
            } else if self.at_keyword("component") {
                c.subcomponents.push(self.subcomponent_decl()?);
            } else if self.at_keyword("connect") {
                let loc = self.advance().loc;
                let source = self.port_ref()?;
                self.expect(&TokenKind::Arrow)?;
                let target = self.port_ref()?;
                self.expect(&TokenKind::Semi)?;
                c.connectors.push(ConnectorDecl::explicit(source, target, loc));
            } else {
                return Err(self.error_here(format!(
                    "expected `autoconnect`, `port`, `component`, `connect` or `}}`, found {}",
                    self.peek().kind.describe()
                )));
            }
        }
        Ok(c)
    }

    fn autoconnect_mode(&mut self) -> Result<AutoconnectMode, Diagnostic> {
        let (mode, loc) = self.expect_name("autoconnect mode")?;
        match mode.as_str() {
            "port" => Ok(AutoconnectMode::Port),
            "type" => Ok(AutoconnectMode::Type),
            "off" => Ok(AutoconnectMode::Off),
            other => Err(Diagnostic::error(
                Code::ParseSyntax,
                loc,
                format!("expected autoconnect mode `port`, `type` or `off`, found `{other}`"),
            )),
        }
    }

    fn port_decl(&mut self) -> Result<PortDecl, Diagnostic> {
        let (dir, loc) = self.expect_name("`in` or `out`")?;
        let direction = match dir.as_str() {
            "in" => Direction::In,
            "out" => Direction::Out,
            other => {
                return Err(Diagnostic::error(
                    Code::ParseSyntax,
                    loc,
                    format!("expected `in` or `out`, found `{other}`"),
                ))
            }
        };
        let (data_type, _) = self.expect_name("port type")?;
        let name = match &self.peek().kind {
            TokenKind::Name(n) => {
                let n = n.clone();
                self.advance();
                n
            }
            _ => implicit_name(&data_type),
        };
        Ok(PortDecl { direction, data_type, name, loc })
    }

    /// Parses `component Type [(args)] [name];` with the leading keyword
    /// still pending.
    fn subcomponent_decl(&mut self) -> Result<SubcomponentDecl, Diagnostic> {
        let loc = self.expect_keyword("component")?;
        self.subcomponent_tail(loc)
    }

    /// Parses the remainder of a subcomponent declaration after the
    /// `component` keyword.
    fn subcomponent_tail(&mut self, loc: Loc) -> Result<SubcomponentDecl, Diagnostic> {
        let (component_type, _) = self.expect_name("component type")?;
        let mut args = Vec::new();
        if self.eat(&TokenKind::LParen) {
            loop {
                args.push(self.config_arg()?);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
            self.expect(&TokenKind::RParen)?;
        }
        let name = match &self.peek().kind {
            TokenKind::Name(n) => {
                let n = n.clone();
                self.advance();
                n
            }
            _ => implicit_name(&component_type),
        };
        self.expect(&TokenKind::Semi)?;
        Ok(SubcomponentDecl { component_type, name, args, loc })
    }

    fn config_arg(&mut self) -> Result<ConfigArg, Diagnostic> {
        match &self.peek().kind {
            TokenKind::Int(i) => {
                let i = *i;
                self.advance();
                Ok(ConfigArg::Int(i))
            }
            TokenKind::Str(s) => {
                let s = s.clone();
                self.advance();
                Ok(ConfigArg::Str(s))
            }
            TokenKind::Name(n) => {
                let n = n.clone();
                self.advance();
                Ok(ConfigArg::ParamRef(n))
            }
            other => Err(self.error_here(format!(
                "expected integer, string or parameter reference, found {}",
                other.describe()
            ))),
        }
    }

    fn port_ref(&mut self) -> Result<PortRef, Diagnostic> {
        let (first, _) = self.expect_name("port reference")?;
        if self.eat(&TokenKind::Dot) {
            let (port, _) = self.expect_name("port name")?;
            Ok(PortRef::sub(first, port))
        } else {
            Ok(PortRef::local(first))
        }
    }

    // ----- deltas -----

    fn delta(&mut self) -> Result<DeltaModel, Diagnostic> {
        let loc = self.expect_keyword("delta")?;
        let (name, _) = self.expect_name("delta name")?;
        let constraint = if self.eat_keyword("after") { Some(self.constraint_or()?) } else { None };
        self.expect(&TokenKind::LBrace)?;
        let mut body = Vec::new();
        while !self.eat(&TokenKind::RBrace) {
            if self.at_keyword("modify") {
                let mloc = self.advance().loc;
                self.expect_keyword("component")?;
                let (comp, _) = self.expect_name("component name")?;
                if self.peek().kind == TokenKind::LParen {
                    return Err(Diagnostic::error(
                        Code::ParseSyntax,
                        mloc,
                        "configuration modification requires an enclosing `modify component` block",
                    ));
                }
                self.expect(&TokenKind::LBrace)?;
                while !self.eat(&TokenKind::RBrace) {
                    let op = self.op_stmt()?;
                    body.push((OpScope::Component(comp.clone()), op));
                }
            } else if self.at_keyword("expand") || self.at_keyword("introduce") || self.at_keyword("remove") {
                let op = self.global_op()?;
                body.push((OpScope::Global, op));
            } else {
                return Err(self.error_here(format!(
                    "expected `modify`, `expand`, `introduce`, `remove` or `}}`, found {}",
                    self.peek().kind.describe()
                )));
            }
        }
        Ok(DeltaModel { name, constraint, body, loc })
    }

    /// Parses `expand autoconnect;`, `introduce autoconnect <mode>;` or
    /// `remove unreachable(s);` — the operations valid at delta scope.
    fn global_op(&mut self) -> Result<ModificationOp, Diagnostic> {
        if self.at_keyword("expand") {
            let loc = self.advance().loc;
            self.expect_keyword("autoconnect")?;
            self.expect(&TokenKind::Semi)?;
            Ok(ModificationOp::ExpandAutoconnect { loc })
        } else if self.at_keyword("introduce") {
            let loc = self.advance().loc;
            self.expect_keyword("autoconnect")?;
            let mode = self.autoconnect_mode()?;
            if mode == AutoconnectMode::Off {
                return Err(Diagnostic::error(
                    Code::ParseSyntax,
                    loc,
                    "`introduce autoconnect` expects mode `port` or `type`",
                ));
            }
            self.expect(&TokenKind::Semi)?;
            Ok(ModificationOp::IntroduceAutoconnect { mode, loc })
        } else {
            let loc = self.expect_keyword("remove")?;
            let (what, wloc) = self.expect_name("`unreachable`")?;
            if what != "unreachable" && what != "unreachables" {
                return Err(Diagnostic::error(
                    Code::ParseSyntax,
                    wloc,
                    format!("expected `unreachable` after `remove` at delta scope, found `{what}`"),
                ));
            }
            self.expect(&TokenKind::Semi)?;
            Ok(ModificationOp::RemoveUnreachable { loc })
        }
    }

    fn op_stmt(&mut self) -> Result<ModificationOp, Diagnostic> {
        if self.at_keyword("add") {
            let loc = self.advance().loc;
            let (what, wloc) = self.expect_name("`port`, `component`, `parameter` or `autoconnect`")?;
            match what.as_str() {
                "port" => {
                    let port = self.port_decl()?;
                    self.expect(&TokenKind::Semi)?;
                    Ok(ModificationOp::AddPort(port))
                }
                "component" => {
                    let sub = self.subcomponent_tail(loc)?;
                    Ok(ModificationOp::AddSubcomponent(sub))
                }
                "parameter" => {
                    let (name, ploc) = self.expect_name("parameter name")?;
                    self.expect(&TokenKind::Semi)?;
                    Ok(ModificationOp::AddParameter(ParameterDecl { name, loc: ploc }))
                }
                "autoconnect" => {
                    let mode = self.autoconnect_mode()?;
                    self.expect(&TokenKind::Semi)?;
                    Ok(ModificationOp::SetAutoconnect { mode, loc })
                }
                other => Err(Diagnostic::error(
                    Code::ParseSyntax,
                    wloc,
                    format!("cannot add `{other}`: expected `port`, `component`, `parameter` or `autoconnect`"),
                )),
            }
        } else if self.at_keyword("remove") {
            let loc = self.advance().loc;
            let (what, wloc) = self.expect_name("`port`, `component`, `parameter` or `unreachable`")?;
            match what.as_str() {
                "port" => {
                    let (name, _) = self.expect_name("port name")?;
                    self.expect(&TokenKind::Semi)?;
                    Ok(ModificationOp::RemovePort { name, loc })
                }
                "component" => {
                    let (name, _) = self.expect_name("subcomponent name")?;
                    self.expect(&TokenKind::Semi)?;
                    Ok(ModificationOp::RemoveSubcomponent { name, loc })
                }
                "parameter" => {
                    let (name, _) = self.expect_name("parameter name")?;
                    self.expect(&TokenKind::Semi)?;
                    Ok(ModificationOp::RemoveParameter { name, loc })
                }
                "unreachable" | "unreachables" => {
                    self.expect(&TokenKind::Semi)?;
                    Ok(ModificationOp::RemoveUnreachable { loc })
                }
                other => Err(Diagnostic::error(
                    Code::ParseSyntax,
                    wloc,
                    format!(
                        "cannot remove `{other}`: expected `port`, `component`, `parameter` or `unreachable`"
                    ),
                )),
            }
        } else if self.at_keyword("connect") {
            let loc = self.advance().loc;
            let source = self.port_ref()?;
            self.expect(&TokenKind::Arrow)?;
            let target = self.port_ref()?;
            self.expect(&TokenKind::Semi)?;
            Ok(ModificationOp::Connect(ConnectorDecl::explicit(source, target, loc)))
        } else if self.at_keyword("disconnect") {
            let loc = self.advance().loc;
            let source = self.port_ref()?;
            self.expect(&TokenKind::Arrow)?;
            let target = self.port_ref()?;
            self.expect(&TokenKind::Semi)?;
            Ok(ModificationOp::Disconnect { source, target, loc })
        } else if self.at_keyword("rename") {
            let loc = self.advance().loc;
            let (what, wloc) = self.expect_name("`port`, `component` or `parameter`")?;
            let kind = match what.as_str() {
                "port" => ElementKind::Port,
                "component" => ElementKind::Subcomponent,
                "parameter" => ElementKind::Parameter,
                other => {
                    return Err(Diagnostic::error(
                        Code::ParseSyntax,
                        wloc,
                        format!("cannot rename `{other}`: expected `port`, `component` or `parameter`"),
                    ))
                }
            };
            let (old, _) = self.expect_name("element name")?;
            self.expect_keyword("as")?;
            let (new, _) = self.expect_name("new element name")?;
            self.expect(&TokenKind::Semi)?;
            Ok(ModificationOp::Rename { kind, old, new, loc })
        } else if self.at_keyword("replace") {
            let loc = self.advance().loc;
            self.expect_keyword("component")?;
            let (old, _) = self.expect_name("subcomponent name")?;
            self.expect_keyword("with")?;
            let (with_type, _) = self.expect_name("component type")?;
            let new_name = match &self.peek().kind {
                TokenKind::Name(n) => {
                    let n = n.clone();
                    self.advance();
                    Some(n)
                }
                _ => None,
            };
            self.expect(&TokenKind::Semi)?;
            Ok(ModificationOp::Replace { old, with_type, new_name, loc })
        } else if self.at_keyword("modify") {
            let loc = self.advance().loc;
            self.expect_keyword("component")?;
            let (subcomponent, _) = self.expect_name("subcomponent name")?;
            if self.peek().kind == TokenKind::LBrace {
                return Err(Diagnostic::error(
                    Code::ParseSyntax,
                    loc,
                    "nested `modify component` blocks are not supported; use a separate block",
                ));
            }
            self.expect(&TokenKind::LParen)?;
            let mut assignments = Vec::new();
            loop {
                let (pname, _) = self.expect_name("parameter name")?;
                self.expect(&TokenKind::Assign)?;
                assignments.push((pname, self.config_arg()?));
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
            self.expect(&TokenKind::RParen)?;
            self.expect(&TokenKind::Semi)?;
            Ok(ModificationOp::ModifyConfig { subcomponent, assignments, loc })
        } else if self.at_keyword("expand") || self.at_keyword("introduce") {
            self.global_op()
        } else {
            Err(self.error_here(format!(
                "expected a modification operation, found {}",
                self.peek().kind.describe()
            )))
        }
    }

    // ----- configurations -----

    fn config(&mut self) -> Result<ProductConfiguration, Diagnostic> {
        let loc = self.expect_keyword("deltaconfig")?;
        let (name, _) = self.expect_name("configuration name")?;
        self.expect(&TokenKind::LBrace)?;
        let mut deltas: Vec<String> = Vec::new();
        if !self.at_keyword_rbrace() {
            loop {
                let (d, dloc) = self.expect_name("delta name")?;
                if deltas.contains(&d) {
                    return Err(Diagnostic::error(
                        Code::ParseSyntax,
                        dloc,
                        format!("delta `{d}` is listed twice in configuration `{name}`"),
                    ));
                }
                deltas.push(d);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        self.expect(&TokenKind::RBrace)?;
        Ok(ProductConfiguration { name, deltas, loc })
    }

    fn at_keyword_rbrace(&self) -> bool {
        self.peek().kind == TokenKind::RBrace
    }

    // ----- order constraints -----

    fn constraint_or(&mut self) -> Result<OrderConstraint, Diagnostic> {
        let mut left = self.constraint_and()?;
        while self.eat(&TokenKind::OrOr) {
            let right = self.constraint_and()?;
            left = OrderConstraint::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn constraint_and(&mut self) -> Result<OrderConstraint, Diagnostic> {
        let mut left = self.constraint_unary()?;
        while self.eat(&TokenKind::AndAnd) {
            let right = self.constraint_unary()?;
            left = OrderConstraint::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn constraint_unary(&mut self) -> Result<OrderConstraint, Diagnostic> {
        if self.eat(&TokenKind::Bang) {
            Ok(OrderConstraint::Not(Box::new(self.constraint_unary()?)))
        } else if self.eat(&TokenKind::LParen) {
            let inner = self.constraint_or()?;
            self.expect(&TokenKind::RParen)?;
            Ok(inner)
        } else {
            let (name, _) = self.expect_name("delta name")?;
            Ok(OrderConstraint::Delta(name))
        }
    }
}
