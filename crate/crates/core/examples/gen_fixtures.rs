//! Regenerates the JSON fixture files under `fixtures/` from the built-in
//! builders, so documents and builders can never drift apart.
//!
//! Run from the repository root: `cargo run -p ckgraph --example gen_fixtures`

use std::fs;
use std::path::Path;

use ckgraph::doc::KGraphDoc;
use ckgraph::families;
use ckgraph::graph::GraphDoc;

fn main() {
    let dir = Path::new("fixtures");
    fs::create_dir_all(dir).expect("fixtures dir");
    let write = |name: &str, body: String| {
        fs::write(dir.join(name), body + "\n").expect("write fixture");
        println!("wrote fixtures/{name}");
    };

    for name in ["loop_plus_edge", "single_loop", "single_loop_with_exit", "acyclic_chain"] {
        let g = families::builtin_digraph(name).unwrap();
        let doc = GraphDoc::from_graph(&g);
        write(&format!("{name}.json"), serde_json::to_string_pretty(&doc).unwrap());
    }

    for (file, name) in [
        ("two_times", "thesis:2times"),
        ("ktimes3", "thesis:ktimes:3"),
        ("ml2mu3", "thesis:ml2mu3"),
        ("nonhausdorff", "thesis:nonhausdorff"),
        ("two_row", "thesis:two_row"),
        ("alternating", "thesis:alternating"),
    ] {
        let f = families::builtin_staged(name).unwrap();
        write(&format!("{file}.json"), serde_json::to_string_pretty(f.doc()).unwrap());
    }

    for (file, kg) in [
        ("corner", families::builtin_kgraph("corner").unwrap()),
        ("omega_3_2", families::builtin_kgraph("omega:2:3,2").unwrap()),
        ("robertson_stage4", ckgraph::kstaged::StagedKGraph::robertson().stage(4)),
    ] {
        let doc = KGraphDoc::from_kgraph(&kg);
        write(&format!("{file}.json"), serde_json::to_string_pretty(&doc).unwrap());
    }
}
