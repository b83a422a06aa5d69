//! Build a system breakdown, walk it, export it to Graphviz DOT, and check
//! which components the parameter analysis has not covered yet.
//!
//! ```sh
//! cargo run --example sbd_to_dot > tree.dot && dot -Tsvg tree.dot -o tree.svg
//! ```

use usat::sbd::{build_sbd, coverage_check, to_dot, NodeKind, SbdNode};

fn node(id: &str, name: &str, parent: Option<&str>, kind: NodeKind) -> SbdNode {
    SbdNode {
        id: id.to_string(),
        name: name.to_string(),
        description: format!("{name} of the example rig"),
        parent: parent.map(str::to_string),
        kind,
    }
}

fn main() {
    let sbd = build_sbd(vec![
        node("RIG", "Converter test rig", None, NodeKind::System),
        node("RIG-DC", "DC supply", Some("RIG"), NodeKind::Subsystem),
        node("RIG-DC-SRC", "Source", Some("RIG-DC"), NodeKind::Component),
        node("RIG-DC-FLT", "Input filter", Some("RIG-DC"), NodeKind::Component),
        node("RIG-DUT", "Device under test", Some("RIG"), NodeKind::Component),
        node("RIG-MEAS", "Measurement chain", Some("RIG"), NodeKind::Component),
    ])
    .unwrap();

    // Depth-first walk in declaration order — the same order every view of
    // the tree uses (reports, coverage lists, DOT edges).
    eprintln!("tree walk:");
    for n in sbd.tree_order() {
        eprintln!(
            "{:indent$}{} [{}] {}",
            "",
            n.id,
            n.kind,
            n.name,
            indent = 2 * sbd.depth(&n.id)
        );
    }

    // Pretend the parameter walk covered two components so far.
    let uncovered = coverage_check(&sbd, ["RIG-DC-SRC", "RIG-DUT"]).unwrap();
    eprintln!("not yet covered: {}", uncovered.join(", "));

    // DOT goes to stdout so it can be piped straight into graphviz.
    print!("{}", to_dot(&sbd));
}
