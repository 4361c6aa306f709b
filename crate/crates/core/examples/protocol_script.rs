//! Writing a protocol as text, printing its canonical form and running it.
//!
//! Run with `cargo run --example protocol_script`.

use qgas::protocol::{execute, parse, render, Execution};

pub const SOURCE: &str = "\
# sort a spin gas, then let it mix back
space spin dim 2
ket up = [1, 0]
ket down = [0, 1]
gas Up from ket up
gas Down from ket down
observer lab table { up -> up, down -> down } dim 2
chamber A volume 1
fill A { Up: 0.5, Down: 0.5 } moles 1

checkpoint start
separate A by povm { up, down } into B C
mix B C into A by povm { up, down }
assert-closed lab from start
audit lab from start
";

pub fn run() -> Result<Execution, Box<dyn std::error::Error>> {
    let ast = parse(SOURCE)?;
    println!("canonical form:\n{}", render(&ast));
    let exec = execute(&ast)?;
    for e in exec.ledger.events() {
        println!("{:>3} {:<10} Q = {:+.9}", e.step_index, e.kind, e.heat_absorbed_by_gas);
    }
    for v in &exec.verdicts {
        println!("{} from {}: {}", v.observer, v.from_checkpoint, v.classification);
    }

    match parse("space spin dim 2\nseparate A by eigenbasis into B C\n") {
        Err(e) => println!("rejected as expected: {e}"),
        Ok(_) => unreachable!("undeclared chamber must not parse"),
    }
    Ok(exec)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run().map(|_| ())
}
