//! The quantum group SU_q(2) for real `0 < q < 1`.
//!
//! Relations for the fundamental `[[a, -q c*], [c, a*]]` being unitary,
//! oriented so that `a`-letters precede `c`-letters and `c` precedes `c*`:
//!
//! ```text
//! c a  -> q⁻¹ a c      c* a  -> q⁻¹ a c*
//! c a* -> q a* c       c* a* -> q a* c*
//! c* c -> c c*         a* a  -> 1 - c c*      a a* -> 1 - q² c c*
//! ```
//!
//! Normal words are `a^k c^m c*^n` and `a*^k c^m c*^n`.

use std::sync::Arc;

use serde_json::{json, Value};

use super::PresentedQG;
use crate::error::{Error, Result};

pub fn suq2_json(q: f64, truncation: usize) -> Value {
    let qi = 1.0 / q;
    json!({
        "kind": "presented",
        "name": format!("suq2_q{q}"),
        "generators": ["a", "c"],
        "relations": [
            {"lhs": "c a", "rhs": [[qi, "a c"]]},
            {"lhs": "c* a", "rhs": [[qi, "a c*"]]},
            {"lhs": "c a*", "rhs": [[q, "a* c"]]},
            {"lhs": "c* a*", "rhs": [[q, "a* c*"]]},
            {"lhs": "c* c", "rhs": [[1.0, "c c*"]]},
            {"lhs": "a* a", "rhs": [[1.0, ""], [-1.0, "c c*"]]},
            {"lhs": "a a*", "rhs": [[1.0, ""], [-q * q, "c c*"]]}
        ],
        "coproduct": {
            "a": [[1.0, "a", "a"], [-q, "c*", "c"]],
            "c": [[1.0, "c", "a"], [1.0, "a*", "c"]]
        },
        "counit": {"a": 1.0, "c": 0.0},
        "antipode": {
            "a": [[1.0, "a*"]],
            "a*": [[1.0, "a"]],
            "c": [[-q, "c"]],
            "c*": [[-qi, "c*"]]
        },
        "fundamental": [
            [[[1.0, "a*"]], [[-q, "c"]]],
            [[[1.0, "c*"]], [[1.0, "a"]]]
        ],
        "truncation": truncation,
        "labels": "spin"
    })
}

pub fn suq2(q: f64, truncation: usize) -> Result<Arc<PresentedQG>> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Unsupported(format!("SU_q(2) needs 0 < q < 1, got {q}")));
    }
    Ok(Arc::new(PresentedQG::from_json(&suq2_json(q, truncation))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fdlin::linalg::C64;

    #[test]
    fn normal_word_counts() {
        let p = suq2(0.5, 6).unwrap();
        let core = p.core(4).unwrap();
        use crate::fdlin::star::StarAlgebra;
        // (k + 1)² words of degree exactly k
        assert_eq!(core.prefix_len(0), 1);
        assert_eq!(core.prefix_len(1), 5);
        assert_eq!(core.prefix_len(2), 14);
        assert_eq!(core.dim(), 55);
    }

    #[test]
    fn single_relation_by_hand() {
        let p = suq2(0.5, 6).unwrap();
        let ca = p.normal_form(&p.word("c a").unwrap()).unwrap();
        let ac = p.normal_form(&p.word("a c").unwrap()).unwrap();
        assert_eq!(ca.len(), 1);
        assert_eq!(ca[0].0, ac[0].0);
        // a c = q · c a
        assert!((ac[0].1 - C64::new(0.5, 0.0) * ca[0].1).norm() < 1e-15);
    }
}
