use super::{GroupBackend, GroupElement};
use crate::error::{Error, Result};

/// `x`, `x^-1`, `x^3`; `e` or `1` for the identity.
pub(super) fn parse(backend: &GroupBackend, text: &str) -> Result<GroupElement> {
    let mut acc = backend.identity_nf().clone();
    for token in text.split_whitespace() {
        if token == "e" || token == "1" {
            continue;
        }
        let (name, exp) = match token.split_once('^') {
            Some((n, e)) => {
                let exp: i64 = e.parse().map_err(|_| Error::Parse(format!("bad exponent in `{token}`")))?;
                (n, exp)
            }
            None => (token, 1),
        };
        let index = backend
            .names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Parse(format!("unknown generator `{name}`")))?;
        let pos = backend.primary_position(index);
        let step = if exp < 0 { backend.gen_inverse[pos] } else { pos };
        for _ in 0..exp.unsigned_abs() {
            acc = backend.mul_gen_raw(&acc, step);
        }
    }
    Ok(backend.elem(acc))
}

pub(super) fn format(backend: &GroupBackend, word: &[usize]) -> String {
    if word.is_empty() {
        return "e".to_string();
    }
    let mut tokens: Vec<String> = Vec::new();
    let mut i = 0;
    while i < word.len() {
        let pos = word[i];
        let run = word[i..].iter().take_while(|&&p| p == pos).count();
        let g = &backend.generators[pos];
        let name = &backend.names[g.index];
        let exp = if g.is_inverse { -(run as i64) } else { run as i64 };
        tokens.push(if exp == 1 { name.clone() } else { format!("{name}^{exp}") });
        i += run;
    }
    tokens.join(" ")
}

#[cfg(test)]
mod tests {
    use crate::group::GroupBackend;

    #[test]
    fn rejects_unknown_tokens() {
        let f2 = GroupBackend::free(2).unwrap();
        assert!(f2.parse_element("q").is_err());
        assert!(f2.parse_element("x^a").is_err());
        assert!(f2.is_identity(&f2.parse_element("e").unwrap()));
        assert!(f2.is_identity(&f2.parse_element("x x^-1").unwrap()));
        assert!(f2.is_identity(&f2.parse_element("").unwrap()));
    }
}
