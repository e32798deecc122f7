//! Literal syntaxes accepted on the command line.

use std::path::Path;

use solenoid_core::profinite::{ModulusChain, DEFAULT_DEPTH};
use solenoid_core::ricci::TriMesh;
use solenoid_core::{BigInt, BigRational};

use crate::commands::Failure;

pub fn bigint(s: &str) -> Result<BigInt, String> {
    s.trim().parse().map_err(|_| format!("not an integer: {s:?}"))
}

/// `p/q` or an integer.
pub fn rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let q: BigRational = s.parse().map_err(|_| format!("not a rational p/q: {s:?}"))?;
    Ok(q)
}

pub fn u64_list(s: &str) -> Result<Vec<u64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| format!("not a nonnegative integer: {t:?}")))
        .collect()
}

pub fn bigint_list(s: &str) -> Result<Vec<BigInt>, String> {
    s.split(',').map(bigint).collect()
}

pub fn rational_list(s: &str) -> Result<Vec<BigRational>, String> {
    s.split(',').map(rational).collect()
}

/// `factorial`, `powers:B` or an explicit list `m1,m2,…`.
pub fn chain(spec: &str, depth: Option<usize>) -> Result<ModulusChain, Failure> {
    let depth = depth.unwrap_or(DEFAULT_DEPTH);
    let spec = spec.trim();
    let chain = if spec == "factorial" {
        ModulusChain::factorial(depth)
    } else if let Some(b) = spec.strip_prefix("powers:") {
        let b = b.trim().parse::<u64>().map_err(|_| Failure::precondition(format!("bad base in {spec:?}")))?;
        ModulusChain::powers(b, depth)
    } else {
        let moduli = bigint_list(spec).map_err(Failure::precondition)?;
        ModulusChain::new(moduli)
    };
    chain.map_err(|e| Failure::precondition(e.to_string()))
}

fn dims(s: &str) -> Result<(usize, usize), Failure> {
    let (m, n) = s.split_once('x').ok_or_else(|| Failure::precondition(format!("expected MxN, got {s:?}")))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| Failure::precondition(format!("bad size {t:?}")));
    Ok((parse(m)?, parse(n)?))
}

/// A built-in mesh (`genus2-one-vertex`, `genus2-grid:MxN`, `torus:MxN`) or
/// a JSON file.
pub fn mesh(spec: &str) -> Result<TriMesh, Failure> {
    let pre = |e: solenoid_core::ricci::FlowError| Failure::precondition(e.to_string());
    if spec == "genus2-one-vertex" {
        return Ok(TriMesh::genus2_one_vertex());
    }
    if let Some(d) = spec.strip_prefix("genus2-grid:") {
        let (m, n) = dims(d)?;
        return TriMesh::genus2_grid(m, n).map_err(pre);
    }
    if let Some(d) = spec.strip_prefix("torus:") {
        let (m, n) = dims(d)?;
        return TriMesh::torus_grid(m, n).map_err(pre);
    }
    let text = read(Path::new(spec))?;
    serde_json::from_str(&text).map_err(|e| Failure::precondition(format!("{spec}: {e}")))
}

pub fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::precondition(format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::precondition(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_and_lists() {
        assert_eq!(rational("3/6").unwrap(), BigRational::new(1.into(), 2.into()));
        assert_eq!(rational("-4").unwrap(), BigRational::from_integer((-4).into()));
        assert!(rational("0.5").is_err());
        assert_eq!(u64_list("2, 3,5").unwrap(), vec![2, 3, 5]);
    }

    #[test]
    fn chain_specs() {
        assert_eq!(chain("factorial", Some(4)).unwrap().top(), &BigInt::from(24));
        assert_eq!(chain("powers:3", Some(2)).unwrap().top(), &BigInt::from(9));
        assert_eq!(chain("2,6,12", None).unwrap().depth(), 3);
        assert!(chain("2,5", None).is_err());
    }

    #[test]
    fn builtin_meshes() {
        assert_eq!(mesh("genus2-grid:3x3").unwrap().genus(), 2);
        assert_eq!(mesh("torus:4x5").unwrap().euler_characteristic(), 0);
        assert!(mesh("torus:4").is_err());
    }
}
