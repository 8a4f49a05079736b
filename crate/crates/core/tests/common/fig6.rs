//! Reference goals for the loopSimple example, transcribed into SMT-LIB
//! from the upstream tool's generated output, plus a builder for the
//! implication query "our verification conditions entail the reference
//! goal".
//!
//! Transcription conventions: integer division is the theory's Euclidean
//! `div` (the operands are nonnegative wherever these goals constrain
//! them, so rounding conventions agree), `if .. then .. else ..` becomes
//! `ite`, and primed binders are quoted symbols.

use boole::smt::{expr_to_smt, smt_symbol};
use boole::vcgen::VerificationCondition;

pub const ENTRY_INVARIANT_GOAL: &str = "\
(forall ((n Int))
  (=> (< 0 n) (=> (>= n 0) (and (<= 0 n) true))))";

pub const PRESERVATION_GOAL: &str = "\
(forall ((n Int) (i Int) (sum Int))
  (=> (< 0 n)
  (=> (< i n)
  (=> (and (<= i n) (= (div (* i (- i 1)) 2) sum))
  (=> (>= n 0)
      (and (<= (+ i 1) n) (= (div (* (+ i 1) (- (+ i 1) 1)) 2) (+ sum i))))))))";

const POST_LOOP_HYPOTHESES: &str = "\
  (=> (>= n 0)
  (=> (ite (< 0 n) (< 0 n) true)
  (=> (ite (< 0 n) (< i n) true)
  (=> (ite (< 0 n) (and (<= i n) (= (div (* i (- i 1)) 2) sum)) true)
  (=> (ite (< 0 n) (not (< |i'| n)) true)
  (=> (ite (< 0 n) (and (<= |i'| n) (= (div (* |i'| (- |i'| 1)) 2) |sum'|)) true)
  (=> (ite (ite (< 0 n) false true) (ite (< 0 n) false true) true)";

pub fn sum_assert_goal() -> String {
    format!(
        "(forall ((n Int) (i Int) (sum Int) (|i'| Int) (|sum'| Int))\n{POST_LOOP_HYPOTHESES}\n      \
         (= (div (* n (- n 1)) 2) (ite (< 0 n) |sum'| 0))))))))))"
    )
}

pub fn neg_cond_goal() -> String {
    format!(
        "(forall ((n Int) (i Int) (sum Int) (|i'| Int) (|sum'| Int))\n{POST_LOOP_HYPOTHESES}\n      \
         (= (ite (< 0 n) |i'| 0) n)))))))))"
    )
}

/// One verification condition as a closed formula:
/// `forall binders, hypotheses -> goal`.
pub fn quantified_vc(vc: &VerificationCondition) -> String {
    let mut body = expr_to_smt(&vc.goal);
    for hyp in vc.hypotheses.iter().rev() {
        body = format!("(=> {} {})", expr_to_smt(hyp), body);
    }
    if vc.binders.is_empty() {
        return body;
    }
    let binders: Vec<String> = vc
        .binders
        .iter()
        .map(|(name, ty)| {
            let sort = match ty {
                boole::ast::BType::Int => "Int",
                boole::ast::BType::Bool => "Bool",
            };
            format!("({} {sort})", smt_symbol(name))
        })
        .collect();
    format!("(forall ({}) {body})", binders.join(" "))
}

/// Script asserting the conjunction of `vcs` and the negation of
/// `reference_goal`; `unsat` means the conjunction entails the goal.
pub fn implication_script(vcs: &[VerificationCondition], reference_goal: &str) -> String {
    let mut out = String::from("(set-logic ALL)\n");
    for vc in vcs {
        out.push_str(&format!("(assert {})\n", quantified_vc(vc)));
    }
    out.push_str(&format!("(assert (not {reference_goal}))\n(check-sat)\n"));
    out
}
