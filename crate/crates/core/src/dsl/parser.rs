use crate::detection::Predicate;
use crate::elements::PolarizationAxis;
use crate::error::{DslError, Pos};

use super::lexer::{tokenize, Token, TokenKind, Unit};
use super::spec::{
    validate_with, DetectorDecl, ElementDecl, ElementKind, ExperimentSpec, ParamDecl, ParamValue, SourceDecl,
    SourceKind, Spans, SweepRange, Value, WitnessDecl, WitnessKind,
};

/// Parse and validate an experiment description.
pub fn parse_str(text: &str) -> Result<ExperimentSpec, DslError> {
    parse(&tokenize(text)?)
}

/// Parse a token stream into a validated [`ExperimentSpec`]. Angles given
/// in degrees are converted to radians.
pub fn parse(tokens: &[Token]) -> Result<ExperimentSpec, DslError> {
    let mut p = Parser {
        tokens,
        idx: 0,
        spec: ExperimentSpec::default(),
        spans: Spans::default(),
        seen: Vec::new(),
    };
    p.program()?;
    validate_with(&p.spec, &p.spans)?;
    Ok(p.spec)
}

struct Parser<'a> {
    tokens: &'a [Token],
    idx: usize,
    spec: ExperimentSpec,
    spans: Spans,
    seen: Vec<&'static str>,
}

const STATEMENTS: &str =
    "a statement (experiment, config, param, mode, source, element, detector, postselect, condition, witness, trials, seed)";

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.idx)
    }

    fn pos(&self) -> Pos {
        self.peek()
            .map(|t| t.pos)
            .or_else(|| self.tokens.last().map(|t| Pos::new(t.pos.line, t.pos.col + 1)))
            .unwrap_or(Pos::new(1, 1))
    }

    fn next(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.idx);
        self.idx += 1;
        t
    }

    fn fail<T>(&self, expected: &str) -> Result<T, DslError> {
        Err(DslError::Syntax {
            pos: self.pos(),
            expected: expected.to_string(),
            found: self
                .peek()
                .map(|t| t.kind.describe())
                .unwrap_or_else(|| "end of input".into()),
        })
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek().is_some_and(|t| &t.kind == kind)
    }

    fn at_word(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Token { kind: TokenKind::Ident(s), .. }) if s == word)
    }

    fn expect(&mut self, kind: TokenKind) -> Result<(), DslError> {
        if self.at(&kind) {
            self.idx += 1;
            Ok(())
        } else {
            self.fail(&kind.describe())
        }
    }

    fn expect_word(&mut self, word: &str) -> Result<(), DslError> {
        if self.at_word(word) {
            self.idx += 1;
            Ok(())
        } else {
            self.fail(&format!("`{word}`"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, DslError> {
        match self.peek() {
            Some(Token { kind: TokenKind::Ident(s), .. }) => {
                self.idx += 1;
                Ok(s.clone())
            }
            _ => self.fail(what),
        }
    }

    fn ident_list(&mut self, what: &str) -> Result<Vec<String>, DslError> {
        let mut out = vec![self.ident(what)?];
        while self.at(&TokenKind::Comma) {
            self.idx += 1;
            out.push(self.ident(what)?);
        }
        Ok(out)
    }

    fn number(&mut self) -> Result<(f64, Option<Unit>), DslError> {
        match self.peek() {
            Some(Token { kind: TokenKind::Number { value, unit, .. }, .. }) => {
                self.idx += 1;
                Ok((*value, *unit))
            }
            _ => self.fail("a number"),
        }
    }

    /// Number with optional unit, converted to radians when a unit is given.
    fn quantity(&mut self) -> Result<f64, DslError> {
        let (v, unit) = self.number()?;
        Ok(unit.map_or(v, |u| u.to_radians(v)))
    }

    fn integer(&mut self, what: &str) -> Result<u64, DslError> {
        let pos = self.pos();
        let (v, unit) = self.number()?;
        if unit.is_some() || v < 0.0 || v.fract() != 0.0 || v > u64::MAX as f64 {
            return Err(DslError::semantic(pos, format!("{what} must be a non-negative integer")));
        }
        Ok(v as u64)
    }

    fn value(&mut self) -> Result<Value, DslError> {
        match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Ident(s)) => {
                self.idx += 1;
                Ok(Value::Param(s.clone()))
            }
            Some(TokenKind::Number { .. }) => Ok(Value::Const(self.quantity()?)),
            _ => self.fail("a number or parameter name"),
        }
    }

    fn end_of_statement(&mut self) -> Result<(), DslError> {
        match self.peek() {
            None => Ok(()),
            Some(Token { kind: TokenKind::Newline, .. }) => {
                self.idx += 1;
                Ok(())
            }
            _ => self.fail("end of line"),
        }
    }

    fn once(&mut self, keyword: &'static str, pos: Pos) -> Result<(), DslError> {
        if self.seen.contains(&keyword) {
            return Err(DslError::semantic(pos, format!("duplicate `{keyword}` statement")));
        }
        self.seen.push(keyword);
        Ok(())
    }

    fn program(&mut self) -> Result<(), DslError> {
        while let Some(tok) = self.peek() {
            if tok.kind == TokenKind::Newline {
                self.idx += 1;
                continue;
            }
            self.statement()?;
            self.end_of_statement()?;
        }
        Ok(())
    }

    fn statement(&mut self) -> Result<(), DslError> {
        let pos = self.pos();
        let Some(Token { kind: TokenKind::Ident(word), .. }) = self.peek() else {
            return self.fail(STATEMENTS);
        };
        match word.as_str() {
            "experiment" => {
                self.idx += 1;
                self.once("experiment", pos)?;
                match self.next() {
                    Some(Token { kind: TokenKind::Str(s), .. }) => self.spec.name = s.clone(),
                    _ => {
                        self.idx -= 1;
                        return self.fail("a quoted experiment name");
                    }
                }
            }
            "config" => {
                self.idx += 1;
                self.spans.config = pos;
                loop {
                    let key_pos = self.pos();
                    let key = self.ident("`sigma0` or `gamma`")?;
                    self.expect(TokenKind::Eq)?;
                    let (v, _) = self.number()?;
                    match key.as_str() {
                        "sigma0" => self.spec.config.sigma0 = v,
                        "gamma" => self.spec.config.gamma = v,
                        other => return Err(DslError::semantic(key_pos, format!("unknown config key `{other}`"))),
                    }
                    if !self.at(&TokenKind::Comma) {
                        break;
                    }
                    self.idx += 1;
                }
            }
            "param" => {
                self.idx += 1;
                let name = self.ident("a parameter name")?;
                self.expect(TokenKind::Eq)?;
                let value = self.param_value()?;
                self.spec.params.push(ParamDecl { name, value });
                self.spans.params.push(pos);
            }
            "mode" => {
                self.idx += 1;
                for m in self.ident_list("a mode name")? {
                    self.spec.modes.push(m);
                    self.spans.modes.push(pos);
                }
            }
            "source" => {
                self.idx += 1;
                let kind = self.source_kind()?;
                self.expect(TokenKind::Arrow)?;
                let modes = self.ident_list("a mode name")?;
                self.spec.sources.push(SourceDecl { kind, modes });
                self.spans.sources.push(pos);
            }
            "element" => {
                self.idx += 1;
                let el = self.element()?;
                self.spec.elements.push(el);
                self.spans.elements.push(pos);
            }
            "detector" => {
                self.idx += 1;
                let name = self.ident("a detector name")?;
                self.expect_word("on")?;
                let mode = self.ident("a mode name")?;
                let gamma = if self.at_word("gamma") {
                    self.idx += 1;
                    self.expect(TokenKind::Eq)?;
                    Some(self.number()?.0)
                } else {
                    None
                };
                self.spec.detectors.push(DetectorDecl { name, mode, gamma });
                self.spans.detectors.push(pos);
            }
            "postselect" => {
                self.idx += 1;
                self.once("postselect", pos)?;
                self.spans.selection = pos;
                self.spec.selection = self.predicate()?;
            }
            "condition" => {
                self.idx += 1;
                self.once("condition", pos)?;
                self.expect_word("on")?;
                self.spans.conditioning = pos;
                self.spec.conditioning = self.predicate()?;
            }
            "witness" => {
                self.idx += 1;
                self.once("witness", pos)?;
                self.spans.witness = pos;
                let kind_pos = self.pos();
                let word = self.ident("a witness kind (w2, idw, herald_idw)")?;
                let kind = WitnessKind::from_keyword(&word)
                    .ok_or_else(|| DslError::semantic(kind_pos, format!("unknown witness kind `{word}`")))?;
                self.expect(TokenKind::LParen)?;
                let x = self.ident("a parameter name")?;
                self.expect(TokenKind::Comma)?;
                let y = self.ident("a parameter name")?;
                self.expect(TokenKind::RParen)?;
                self.spec.witness = Some(WitnessDecl { kind, x, y });
            }
            "trials" => {
                self.idx += 1;
                self.once("trials", pos)?;
                self.spans.trials = pos;
                self.spec.trials = self.integer("trials")?;
            }
            "seed" => {
                self.idx += 1;
                self.once("seed", pos)?;
                self.spec.seed = self.integer("seed")?;
            }
            _ => return self.fail(STATEMENTS),
        }
        Ok(())
    }

    fn param_value(&mut self) -> Result<ParamValue, DslError> {
        if self.at_word("sweep") {
            self.idx += 1;
            self.expect(TokenKind::LParen)?;
            let mut nums = Vec::with_capacity(3);
            for i in 0..3 {
                if i > 0 {
                    self.expect(TokenKind::Comma)?;
                }
                nums.push(self.number()?);
            }
            self.expect(TokenKind::RParen)?;
            let unit = self.trailing_unit()?;
            let conv = |(v, u): (f64, Option<Unit>)| u.or(unit).map_or(v, |u| u.to_radians(v));
            return Ok(ParamValue::Sweep(SweepRange::Range {
                start: conv(nums[0]),
                stop: conv(nums[1]),
                step: conv(nums[2]),
            }));
        }
        if self.at(&TokenKind::LBracket) {
            self.idx += 1;
            let mut nums = vec![self.number()?];
            while self.at(&TokenKind::Comma) {
                self.idx += 1;
                nums.push(self.number()?);
            }
            self.expect(TokenKind::RBracket)?;
            let unit = self.trailing_unit()?;
            return Ok(ParamValue::Sweep(SweepRange::List(
                nums.into_iter()
                    .map(|(v, u)| u.or(unit).map_or(v, |u| u.to_radians(v)))
                    .collect(),
            )));
        }
        match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Number { .. }) => Ok(ParamValue::Fixed(self.quantity()?)),
            _ => self.fail("a number, `sweep(...)` or `[...]`"),
        }
    }

    fn trailing_unit(&mut self) -> Result<Option<Unit>, DslError> {
        if let Some(Token { kind: TokenKind::Ident(s), .. }) = self.peek() {
            if let Some(u) = Unit::from_word(s) {
                self.idx += 1;
                return Ok(Some(u));
            }
        }
        Ok(None)
    }

    /// `name=value` pairs inside a call, after the leading arguments.
    fn named_args(&mut self, allowed: &[&str]) -> Result<Vec<(String, Pos, Token)>, DslError> {
        let mut out: Vec<(String, Pos, Token)> = Vec::new();
        while self.at(&TokenKind::Comma) {
            self.idx += 1;
            let pos = self.pos();
            let key = self.ident("an argument name")?;
            if !allowed.contains(&key.as_str()) {
                return Err(DslError::semantic(
                    pos,
                    format!("unexpected argument `{key}` (expected one of: {})", allowed.join(", ")),
                ));
            }
            if out.iter().any(|(k, ..)| k == &key) {
                return Err(DslError::semantic(pos, format!("duplicate argument `{key}`")));
            }
            self.expect(TokenKind::Eq)?;
            let tok = self.peek().cloned();
            let Some(tok) = tok else { return self.fail("an argument value") };
            out.push((key, pos, tok));
            self.idx += 1;
        }
        Ok(out)
    }

    fn arg_value(&self, tok: &Token) -> Result<Value, DslError> {
        match &tok.kind {
            TokenKind::Ident(s) => Ok(Value::Param(s.clone())),
            TokenKind::Number { value, unit, .. } => Ok(Value::Const(unit.map_or(*value, |u| u.to_radians(*value)))),
            other => Err(DslError::Syntax {
                pos: tok.pos,
                expected: "a number or parameter name".into(),
                found: other.describe(),
            }),
        }
    }

    fn source_kind(&mut self) -> Result<SourceKind, DslError> {
        let pos = self.pos();
        let word = self.ident("a source kind (laser, vacuum, entangled)")?;
        match word.as_str() {
            "vacuum" => Ok(SourceKind::Vacuum),
            "laser" => {
                self.expect(TokenKind::LParen)?;
                let key_pos = self.pos();
                let key = self.ident("`alpha` or `alpha2`")?;
                self.expect(TokenKind::Eq)?;
                let v = self.value()?;
                self.expect(TokenKind::RParen)?;
                match key.as_str() {
                    "alpha" => Ok(SourceKind::Laser { alpha: v }),
                    "alpha2" => Ok(SourceKind::LaserIntensity { alpha2: v }),
                    _ => Err(DslError::semantic(key_pos, format!("unexpected laser argument `{key}`"))),
                }
            }
            "entangled" => {
                self.expect(TokenKind::LParen)?;
                self.expect_word("r")?;
                self.expect(TokenKind::Eq)?;
                let r = self.value()?;
                self.expect(TokenKind::RParen)?;
                Ok(SourceKind::Entangled { r })
            }
            other => Err(DslError::semantic(pos, format!("unknown source kind `{other}`"))),
        }
    }

    fn element(&mut self) -> Result<ElementDecl, DslError> {
        let pos = self.pos();
        let word = self.ident("an element kind")?;
        if !ElementKind::KEYWORDS.contains(&word.as_str()) {
            return Err(DslError::semantic(
                pos,
                format!("unknown element kind `{word}` (expected one of: {})", ElementKind::KEYWORDS.join(", ")),
            ));
        }
        self.expect(TokenKind::LParen)?;
        let mut modes = vec![self.ident("a mode name")?];
        let two_mode = matches!(word.as_str(), "bs" | "mirror_swap" | "pbs" | "pdbs");
        if two_mode {
            self.expect(TokenKind::Comma)?;
            modes.push(self.ident("a mode name")?);
        }
        let allowed: &[&str] = match word.as_str() {
            "hwp" => &["theta"],
            "phase" => &["phi", "axis"],
            "polarizer" => &["psi"],
            _ => &[],
        };
        let args = self.named_args(allowed)?;
        self.expect(TokenKind::RParen)?;
        let required = |key: &str| -> Result<Value, DslError> {
            match args.iter().find(|(k, ..)| k == key) {
                Some((_, _, tok)) => self.arg_value(tok),
                None => Err(DslError::semantic(pos, format!("`{word}` requires argument `{key}`"))),
            }
        };
        let kind = match word.as_str() {
            "bs" => ElementKind::Bs,
            "mirror_swap" => ElementKind::MirrorSwap,
            "pbs" => ElementKind::Pbs,
            "pdbs" => ElementKind::Pdbs,
            "hwp" => ElementKind::Hwp { theta: required("theta")? },
            "polarizer" => ElementKind::Polarizer { psi: required("psi")? },
            _ => {
                let phi = required("phi")?;
                let axis = match args.iter().find(|(k, ..)| k == "axis") {
                    None => PolarizationAxis::Both,
                    Some((_, apos, tok)) => match &tok.kind {
                        TokenKind::Ident(s) => PolarizationAxis::from_keyword(s)
                            .ok_or_else(|| DslError::semantic(*apos, format!("unknown axis `{s}` (h, v, both)")))?,
                        _ => return Err(DslError::semantic(*apos, "axis must be h, v or both")),
                    },
                };
                ElementKind::Phase { phi, axis }
            }
        };
        let when = if self.at_word("when") {
            self.idx += 1;
            Some(self.ident("a parameter name")?)
        } else {
            None
        };
        Ok(ElementDecl { kind, modes, when })
    }

    fn predicate(&mut self) -> Result<Predicate, DslError> {
        let mut lhs = self.conjunction()?;
        while self.at(&TokenKind::Pipe) {
            self.idx += 1;
            lhs = lhs.or(self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Predicate, DslError> {
        let mut lhs = self.unary()?;
        while self.at(&TokenKind::Amp) {
            self.idx += 1;
            lhs = lhs.and(self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Predicate, DslError> {
        if self.at(&TokenKind::Bang) {
            self.idx += 1;
            return Ok(self.unary()?.not());
        }
        if self.at(&TokenKind::LParen) {
            self.idx += 1;
            let p = self.predicate()?;
            self.expect(TokenKind::RParen)?;
            return Ok(p);
        }
        let word = self.ident("`click(...)`, `noclick(...)`, `!` or `(`")?;
        match word.as_str() {
            "true" => Ok(Predicate::True),
            "false" => Ok(Predicate::False),
            "click" | "noclick" => {
                self.expect(TokenKind::LParen)?;
                let d = self.ident("a detector name")?;
                self.expect(TokenKind::RParen)?;
                Ok(if word == "click" { Predicate::Click(d) } else { Predicate::NoClick(d) })
            }
            _ => {
                self.idx -= 1;
                self.fail("`click(...)`, `noclick(...)`, `!` or `(`")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    const MINIMAL: &str = "\
experiment \"t\"
mode a, b
source laser(alpha=0.1) -> a
source vacuum -> b
element bs(a, b)
element phase(a, phi=90 deg)
detector D1 on a
detector D2 on b
postselect click(D1) & noclick(D2)
";

    #[test]
    fn minimal_program() {
        let spec = parse_str(MINIMAL).unwrap();
        assert_eq!(spec.name, "t");
        assert_eq!(spec.trials, 1_000_000);
        assert_eq!(spec.elements.len(), 2);
        match &spec.elements[1].kind {
            ElementKind::Phase { phi: Value::Const(v), axis: PolarizationAxis::Both } => {
                assert!((v - FRAC_PI_2).abs() < 1e-15)
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(spec.selection, Predicate::click("D1").and(Predicate::no_click("D2")));
        assert_eq!(spec.conditioning, Predicate::True);
    }

    #[test]
    fn undeclared_detector_in_predicate() {
        let text = MINIMAL.replace("noclick(D2)", "noclick(D7)");
        let err = parse_str(&text).unwrap_err();
        assert!(matches!(&err, DslError::Semantic { pos, msg } if pos.line == 9 && msg.contains("D7")), "{err}");
    }

    #[test]
    fn unknown_element_kind() {
        let text = MINIMAL.replace("element bs(a, b)", "element prism(a, b)");
        let err = parse_str(&text).unwrap_err();
        assert!(matches!(&err, DslError::Semantic { pos, msg } if pos.line == 5 && msg.contains("prism")));
    }

    #[test]
    fn unsourced_mode() {
        let text = MINIMAL.replace("source vacuum -> b\n", "");
        let err = parse_str(&text).unwrap_err();
        assert!(err.to_string().contains("unsourced mode `b`"), "{err}");
    }

    #[test]
    fn duplicate_source() {
        let text = MINIMAL.replace("source vacuum -> b", "source vacuum -> b, a");
        let err = parse_str(&text).unwrap_err();
        assert!(err.to_string().contains("duplicate source"), "{err}");
    }

    #[test]
    fn syntax_error_reports_expected() {
        let err = parse_str("mode a\nsource laser(alpha=0.1) a\n").unwrap_err();
        match err {
            DslError::Syntax { pos, expected, .. } => {
                assert_eq!(pos, Pos::new(2, 25));
                assert_eq!(expected, "`->`");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sweeps_and_lists() {
        let spec = parse_str(&format!(
            "{MINIMAL}param phi = sweep(0, 360, 15) deg\nparam x = [1, 2, 3]\nparam y = [0, 90] deg\n"
        ))
        .unwrap();
        assert_eq!(spec.param("phi").unwrap().value.values().len(), 25);
        assert_eq!(spec.param("x").unwrap().value.values(), vec![1.0, 2.0, 3.0]);
        assert_eq!(spec.param("y").unwrap().value.values()[1], FRAC_PI_2);
    }

    #[test]
    fn when_clause_and_retarder_axis() {
        let text = MINIMAL.replace(
            "element phase(a, phi=90 deg)",
            "param bs2 = 1\nelement phase(a, phi=1.0, axis=v) when bs2",
        );
        let spec = parse_str(&text).unwrap();
        assert_eq!(spec.elements[1].when.as_deref(), Some("bs2"));
        assert!(matches!(spec.elements[1].kind, ElementKind::Phase { axis: PolarizationAxis::Vertical, .. }));
    }

    #[test]
    fn trials_accepts_exponent_integers() {
        let spec = parse_str(&format!("{MINIMAL}trials 5e6\nseed 7\n")).unwrap();
        assert_eq!(spec.trials, 5_000_000);
        assert_eq!(spec.seed, 7);
        assert!(parse_str(&format!("{MINIMAL}trials 1.5\n")).is_err());
    }

    #[test]
    fn missing_required_argument() {
        let err = parse_str(&MINIMAL.replace("phi=90 deg", "axis=v")).unwrap_err();
        assert!(err.to_string().contains("requires argument `phi`"), "{err}");
    }

    #[test]
    fn predicate_precedence() {
        let text = MINIMAL.replace(
            "postselect click(D1) & noclick(D2)",
            "postselect click(D1) | click(D2) & !click(D1)",
        );
        let spec = parse_str(&text).unwrap();
        assert_eq!(
            spec.selection,
            Predicate::click("D1").or(Predicate::click("D2").and(Predicate::click("D1").not()))
        );
    }
}
