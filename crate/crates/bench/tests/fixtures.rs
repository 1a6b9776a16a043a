use nvgz::validate;
use nvgz_bench::{evaluator, fixture, points};

#[test]
fn fixtures_are_valid_and_evaluable() {
    for n in 1..=4 {
        assert!(validate(&fixture(n)).is_ok());
        let ev = evaluator(n);
        for q in points(5) {
            assert!(ev.eval_fields(&q).unwrap().is_real());
        }
    }
}
