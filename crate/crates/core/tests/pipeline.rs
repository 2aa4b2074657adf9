use parcs_core::graph::{instantiate, sample, sample_with_errors, Intervention};
use parcs_core::guideline::parse_guideline;
use parcs_core::io::{read_table, write_masked, write_table};
use parcs_core::{
    apply_missingness, build_mgraph, intervene, lingam_preset, parse_description, randomize, replay, sample_mgraph,
    serialize_graph, MGraphConfig, Mechanism, RandomizationTrace, ZSource,
};

const PARTIAL: &str = "\
node Age : normal(mu=50, sigma=10)
node Dose : normal(mu=?*Age, sigma=?)
node Outcome : random
node Side : optional(p=0.7)
edge Age->Dose : identity, correction
edge Dose->Outcome : random
edge Age->Outcome : optional
edge Dose->Side : required_if_exists
";

const GUIDELINE: &str = "\
nodes:
  distributions: [normal, bernoulli, exponential]
  coef_range: [-2, -0.5] U [0.5, 2]
edges:
  functions: [identity, sigmoid, arctan]
  sparsity: 0.5
corrections:
  policy: bounded
";

#[test]
fn describe_randomize_sample_intervene() {
    let pg = parse_description(PARTIAL).unwrap();
    let g = parse_guideline(GUIDELINE).unwrap();
    for seed in 0..25 {
        let (graph, trace) = randomize(&pg, &g, seed).unwrap();

        let json = trace.to_json();
        let back = RandomizationTrace::from_json(&json).unwrap();
        assert_eq!(replay(&pg, &back).unwrap(), graph);

        let text = serialize_graph(&graph);
        assert_eq!(parse_description(&text).unwrap().to_graph().unwrap(), graph);

        let calibrated = instantiate(&graph, 2000, seed + 1).unwrap();
        let obs = sample(&calibrated, 500, seed).unwrap();
        assert_eq!(obs.data.n_rows(), 500);
        assert!(obs.data.rows.iter().flatten().all(|v| v.is_finite()));

        // errors-in replay is the identity
        let again = sample_with_errors(&calibrated, &obs.errors).unwrap();
        assert_eq!(again.data, obs.data);

        let post = intervene(&calibrated, &Intervention::new().set_constant("Dose", 1.0)).unwrap();
        let cf = sample_with_errors(&post, &obs.errors).unwrap();
        assert_eq!(cf.data.column("Age"), obs.data.column("Age"));
        assert!(cf.data.column("Dose").unwrap().iter().all(|v| *v == 1.0));
    }
}

#[test]
fn tables_round_trip_through_csv() {
    let g = parse_description("node A : normal(mu=0, sigma=1)\nnode B : poisson(lambda=3)\n")
        .unwrap()
        .to_graph()
        .unwrap();
    let batch = sample(&g, 300, 3).unwrap();
    let mut buf = Vec::new();
    write_table(&mut buf, &batch.data).unwrap();
    assert_eq!(read_table(buf.as_slice()).unwrap(), batch.data);
}

#[test]
fn masked_dataset_from_an_m_graph() {
    let z = parse_description(
        "node X : normal(mu=0, sigma=1)\nnode Y : normal(mu=X, sigma=1)\nedge X->Y : identity\n",
    )
    .unwrap()
    .to_graph()
    .unwrap();
    let mut cfg = MGraphConfig::new(Mechanism::Mar(vec!["X".into()]), 0.25);
    cfg.burn_in = 5000;
    let g = parse_guideline("sparsity: 1").unwrap();
    let m = build_mgraph(&ZSource::Graph(&z), &cfg, &g, 4, None).unwrap();
    assert_eq!(m.r_targets, vec!["Y".to_string()]);
    assert!(m.graph.edge("X", "R_Y").is_some());

    let (zt, rt) = sample_mgraph(&m, 8000, 5, None).unwrap();
    let masked = apply_missingness(&zt, &rt).unwrap();
    assert_eq!(masked.achieved_ratio[0], 0.0);
    assert!((masked.achieved_ratio[1] - 0.25).abs() < 0.02);

    let mut buf = Vec::new();
    write_masked(&mut buf, &masked).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let empty = text.lines().skip(1).filter(|l| l.ends_with(',')).count();
    assert_eq!(empty, masked.missing.iter().filter(|r| r[1]).count());
}

#[test]
fn lingam_models_sample() {
    let weights = "[-2,-0.5] U [0.5,2]".parse().unwrap();
    let m = lingam_preset(4, &weights, 11).unwrap();
    let batch = sample(&m.graph, 200, 1).unwrap();
    assert_eq!(batch.data.names.len(), 4);
    let first = m.names[m.order[0]].clone();
    assert!(m.graph.parents(&first).is_empty());
}
