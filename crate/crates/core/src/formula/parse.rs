use std::collections::{BTreeSet, HashMap};

use super::Formula;
use crate::algebra::Signature;
use crate::error::{Error, Result};
use crate::term::Term;

const KEYWORDS: [&str; 8] = ["=", "rel", "not", "and", "or", "implies", "exists", "forall"];

#[derive(Debug, Clone)]
enum Sexp {
    Atom(String, (usize, usize)),
    List(Vec<Sexp>, (usize, usize)),
}

impl Sexp {
    fn pos(&self) -> (usize, usize) {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }
}

fn err<T>(pos: (usize, usize), msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line: pos.0,
        col: pos.1,
        msg: msg.into(),
    })
}

fn read(text: &str) -> Result<Sexp> {
    let mut stack: Vec<(Vec<Sexp>, (usize, usize))> = Vec::new();
    let mut done: Option<Sexp> = None;
    let (mut line, mut col) = (1usize, 0usize);
    let mut chars = text.chars().peekable();
    let mut last = (1, 1);
    while let Some(c) = chars.next() {
        col += 1;
        let here = (line, col);
        last = here;
        if c == '\n' {
            line += 1;
            col = 0;
            continue;
        }
        if c.is_whitespace() {
            continue;
        }
        if c == ';' {
            while let Some(&n) = chars.peek() {
                if n == '\n' {
                    break;
                }
                chars.next();
            }
            continue;
        }
        if done.is_some() {
            return err(here, "trailing input after formula");
        }
        match c {
            '(' => stack.push((Vec::new(), here)),
            ')' => {
                let (items, pos) = stack.pop().ok_or(()).or_else(|_| err(here, "unbalanced `)`"))?;
                let node = Sexp::List(items, pos);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(node),
                    None => done = Some(node),
                }
            }
            _ => {
                let mut tok = String::from(c);
                while let Some(&n) = chars.peek() {
                    if n.is_whitespace() || n == '(' || n == ')' || n == ';' {
                        break;
                    }
                    tok.push(n);
                    chars.next();
                    col += 1;
                }
                let node = Sexp::Atom(tok, here);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(node),
                    None => done = Some(node),
                }
            }
        }
    }
    if let Some((_, pos)) = stack.last() {
        return err(*pos, "unclosed `(`");
    }
    done.ok_or(()).or_else(|_| err(last, "empty input"))
}

fn check_ident(s: &str, pos: (usize, usize), sig: &Signature) -> Result<()> {
    if KEYWORDS.contains(&s) {
        return err(pos, format!("keyword `{s}` used as identifier"));
    }
    if s.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        return err(pos, format!("identifier `{s}` starts with a digit"));
    }
    if sig.contains(s) && sig.op_index(s).is_none() {
        return err(pos, format!("relation symbol `{s}` used as a term"));
    }
    Ok(())
}

fn term(s: &Sexp, sig: &Signature) -> Result<Term> {
    match s {
        Sexp::Atom(name, pos) => {
            check_ident(name, *pos, sig)?;
            match sig.op_index(name) {
                Some(i) if sig.ops()[i].arity == 0 => Ok(Term::constant(name.clone())),
                Some(i) => err(*pos, format!("operation `{name}` needs {} arguments", sig.ops()[i].arity)),
                None => Ok(Term::var(name.clone())),
            }
        }
        Sexp::List(items, pos) => {
            let (head, args) = items.split_first().ok_or(()).or_else(|_| err(*pos, "empty term"))?;
            let Sexp::Atom(op, hpos) = head else {
                return err(head.pos(), "term head must be a symbol");
            };
            let idx = sig
                .op_index(op)
                .ok_or(())
                .or_else(|_| err(*hpos, format!("unknown operation `{op}`")))?;
            let arity = sig.ops()[idx].arity;
            if arity != args.len() {
                return err(*hpos, format!("`{op}` expects {arity} arguments, got {}", args.len()));
            }
            Ok(Term::app(op.clone(), args.iter().map(|a| term(a, sig)).collect::<Result<_>>()?))
        }
    }
}

fn formula(s: &Sexp, sig: &Signature) -> Result<Formula> {
    let Sexp::List(items, pos) = s else {
        return err(s.pos(), "expected a parenthesized formula");
    };
    let Some(Sexp::Atom(head, hpos)) = items.first() else {
        return err(*pos, "formula must start with a keyword");
    };
    let args = &items[1..];
    let arity = |n: usize| -> Result<()> {
        if args.len() != n {
            return err(*hpos, format!("`{head}` expects {n} arguments, got {}", args.len()));
        }
        Ok(())
    };
    match head.as_str() {
        "=" => {
            arity(2)?;
            Ok(Formula::Eq(term(&args[0], sig)?, term(&args[1], sig)?))
        }
        "rel" => {
            let Some(Sexp::Atom(name, npos)) = args.first() else {
                return err(*hpos, "`rel` needs a relation symbol");
            };
            let idx = sig
                .rel_index(name)
                .ok_or(())
                .or_else(|_| err(*npos, format!("unknown relation `{name}`")))?;
            let want = sig.rels()[idx].arity;
            if args.len() - 1 != want {
                return err(*npos, format!("`{name}` expects {want} arguments, got {}", args.len() - 1));
            }
            let ts = args[1..].iter().map(|a| term(a, sig)).collect::<Result<_>>()?;
            Ok(Formula::Rel(name.clone(), ts))
        }
        "not" => {
            arity(1)?;
            Ok(Formula::not(formula(&args[0], sig)?))
        }
        "and" | "or" => {
            if args.is_empty() {
                return err(*hpos, format!("empty `{head}`"));
            }
            let fs = args.iter().map(|a| formula(a, sig)).collect::<Result<Vec<_>>>()?;
            Ok(if head == "and" { Formula::And(fs) } else { Formula::Or(fs) })
        }
        "implies" => {
            arity(2)?;
            Ok(Formula::implies(formula(&args[0], sig)?, formula(&args[1], sig)?))
        }
        "exists" | "forall" => {
            arity(2)?;
            let Sexp::List(vs, vpos) = &args[0] else {
                return err(args[0].pos(), "expected a variable list");
            };
            if vs.is_empty() {
                return err(*vpos, "empty variable list");
            }
            let mut vars = Vec::new();
            for v in vs {
                let Sexp::Atom(name, p) = v else {
                    return err(v.pos(), "expected a variable");
                };
                check_ident(name, *p, sig)?;
                if sig.contains(name) {
                    return err(*p, format!("symbol `{name}` cannot be bound"));
                }
                if vars.contains(name) {
                    return err(*p, format!("variable `{name}` bound twice"));
                }
                vars.push(name.clone());
            }
            let body = Box::new(formula(&args[1], sig)?);
            Ok(if head == "exists" {
                Formula::Exists(vars, body)
            } else {
                Formula::Forall(vars, body)
            })
        }
        other => err(*hpos, format!("unknown connective `{other}`")),
    }
}

/// Renames bound variables that shadow a free variable or an enclosing binder.
fn separate_bound(f: Formula) -> Formula {
    let mut taken: BTreeSet<String> = f.all_vars();
    let free = f.free_vars();
    let mut scope: Vec<String> = free.into_iter().collect();
    rename(f, &mut scope, &mut taken)
}

fn rename(f: Formula, scope: &mut Vec<String>, taken: &mut BTreeSet<String>) -> Formula {
    match f {
        Formula::Not(g) => Formula::not(rename(*g, scope, taken)),
        Formula::And(gs) => Formula::And(gs.into_iter().map(|g| rename(g, scope, taken)).collect()),
        Formula::Or(gs) => Formula::Or(gs.into_iter().map(|g| rename(g, scope, taken)).collect()),
        Formula::Implies(a, b) => Formula::implies(rename(*a, scope, taken), rename(*b, scope, taken)),
        Formula::Exists(ref vs, _) | Formula::Forall(ref vs, _) if vs.iter().any(|v| scope.contains(v)) => {
            let is_exists = matches!(f, Formula::Exists(..));
            let (Formula::Exists(vs, body) | Formula::Forall(vs, body)) = f else {
                unreachable!()
            };
            let mut map = HashMap::new();
            let mut new_vs = Vec::new();
            for v in vs {
                if scope.contains(&v) {
                    let fresh = (2..)
                        .map(|i| format!("{v}_{i}"))
                        .find(|c| !taken.contains(c))
                        .unwrap();
                    taken.insert(fresh.clone());
                    map.insert(v, Term::var(fresh.clone()));
                    new_vs.push(fresh);
                } else {
                    new_vs.push(v);
                }
            }
            let body = body.substitute(&map);
            let rebuilt = if is_exists {
                Formula::Exists(new_vs, Box::new(body))
            } else {
                Formula::Forall(new_vs, Box::new(body))
            };
            rename(rebuilt, scope, taken)
        }
        Formula::Exists(vs, body) => {
            let n = scope.len();
            scope.extend(vs.iter().cloned());
            let b = rename(*body, scope, taken);
            scope.truncate(n);
            Formula::Exists(vs, Box::new(b))
        }
        Formula::Forall(vs, body) => {
            let n = scope.len();
            scope.extend(vs.iter().cloned());
            let b = rename(*body, scope, taken);
            scope.truncate(n);
            Formula::Forall(vs, Box::new(b))
        }
        atom => atom,
    }
}

pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula> {
    let s = read(text)?;
    Ok(separate_bound(formula(&s, sig)?))
}

pub fn parse_term(text: &str, sig: &Signature) -> Result<Term> {
    term(&read(text)?, sig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::stone3;

    fn sig() -> Signature {
        stone3().signature().clone()
    }

    #[test]
    fn round_trip_simple() {
        let text = "(and (= (star (star x1)) z1) (or (= x1 zero) (not (= x1 one))))";
        let f = parse_formula(text, &sig()).unwrap();
        assert_eq!(f.to_string(), text);
    }

    #[test]
    fn quantifiers() {
        let f = parse_formula("(exists (w1 w2) (= (join w1 w2) x1))", &sig()).unwrap();
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), ["x1"]);
    }

    #[test]
    fn shadowing_renamed() {
        let f = parse_formula("(and (= x1 x2) (exists (x1) (= x1 zero)))", &sig()).unwrap();
        assert_eq!(f.to_string(), "(and (= x1 x2) (exists (x1_2) (= x1_2 zero)))");
        let g = parse_formula("(exists (w) (exists (w) (= w zero)))", &sig()).unwrap();
        assert_eq!(g.to_string(), "(exists (w) (exists (w_2) (= w_2 zero)))");
    }

    #[test]
    fn rejects_empty_connectives() {
        assert!(parse_formula("(and)", &sig()).is_err());
        assert!(parse_formula("(or)", &sig()).is_err());
    }

    #[test]
    fn positions_reported() {
        match parse_formula("(and\n  (= x1 (star)))", &sig()) {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (2, 10)),
            other => panic!("unexpected {other:?}"),
        }
        match parse_formula("(= x1 x2", &sig()) {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (1, 1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn constants_and_unknowns() {
        let t = parse_term("(join zero x1)", &sig()).unwrap();
        assert_eq!(t, Term::app("join", vec![Term::constant("zero"), Term::var("x1")]));
        assert!(parse_term("(frob x1)", &sig()).is_err());
        assert!(parse_term("star", &sig()).is_err());
        assert!(parse_formula("(= x1)", &sig()).is_err());
        assert!(parse_formula("(= x1 x1) (= x2 x2)", &sig()).is_err());
    }
}
