use dvsynth_core::automata::translate;
use dvsynth_core::dependency::find_maximal_dependent_set;
use dvsynth_core::ltl::gen_midbit_spec;
use dvsynth_core::projection::project;
use dvsynth_core::{NoClock, Session};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn midbit(n: usize) -> (Session, dvsynth_core::automata::Nba) {
    let spec = gen_midbit_spec(n).unwrap();
    let mut s = Session::new(spec.inputs(), spec.outputs()).unwrap();
    let a = translate(&mut s, &spec, 100).unwrap();
    (s, a)
}

/// Bit `n-1` of `i * o`, with `o` read from the first `n` outputs.
fn middle_bit(n: usize, i: u64, o: u64) -> bool {
    (i.wrapping_mul(o) >> (n - 1)) & 1 == 1
}

#[test]
fn label_is_the_multiplier_bit() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=5 {
        let (s, a) = midbit(n);
        assert_eq!(a.num_states(), 1);
        assert_eq!(a.edges().len(), 1);
        let label = a.edges()[0].label;
        for _ in 0..200 {
            let i: u64 = rng.gen_range(0..1 << n);
            let o: u64 = rng.gen_range(0..1 << n);
            let top: bool = rng.gen();
            let mut letter: Vec<bool> = (0..n).map(|k| i >> k & 1 == 1).collect();
            letter.extend((0..n).map(|k| o >> k & 1 == 1));
            letter.push(top);
            assert_eq!(s.eval_letter(label, &letter), top == middle_bit(n, i, o), "n={n} i={i} o={o}");
        }
    }
}

#[test]
fn top_output_is_dependent_and_erasing_it_leaves_true() {
    for n in 1..=6 {
        let (mut s, a) = midbit(n);
        let order: Vec<usize> = s.vocab.output_atoms().collect();
        let r = find_maximal_dependent_set(&mut s, &a, &order, None, &NoClock);
        let top = 2 * n;
        assert!(r.dependent.contains(&top), "n={n}: {:?}", r.dependent);
        let p = project(&mut s, &a, &[top]);
        assert!(s.bdd.is_true(p.edges()[0].label));
        assert_eq!(p.label_size(&s.bdd), 0);
    }
}

#[test]
fn label_grows_with_n() {
    let sizes: Vec<usize> = (1..=6).map(|n| {
        let (s, a) = midbit(n);
        a.label_size(&s.bdd)
    }).collect();
    assert!(sizes.windows(2).all(|w| w[1] > w[0]), "{sizes:?}");
}
