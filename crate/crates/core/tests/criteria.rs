mod common;

macro_rules! criterion_test {
    ($name:ident, $f:path) => {
        #[test]
        fn $name() {
            if let Err(e) = $f() {
                panic!("{e}");
            }
        }
    };
}

criterion_test!(sl2z_class_count, common::criterion_1);
criterion_test!(sl2z_ring_certified, common::criterion_2);
criterion_test!(rank_five_presentation, common::criterion_3);
criterion_test!(corpus_ranks_match_class_counts, common::criterion_4);
criterion_test!(k_rank_bookkeeping, common::criterion_5);
criterion_test!(gl_rank_identity, common::criterion_6);
criterion_test!(fusion_matches_oracle, common::criterion_7);
criterion_test!(character_tables, common::criterion_8);
criterion_test!(ring_structure, common::criterion_9);
