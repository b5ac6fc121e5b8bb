//! Prints the product and sum tables of the sign algebra and folds a few
//! sign sequences.
//!
//! ```text
//! cargo run --example sign_tables
//! ```

use qpn::sign::{sum_all, ALL_SIGNS};
use qpn::Sign;

fn table(name: &str, op: impl Fn(Sign, Sign) -> Sign) {
    print!("{name:>3} |");
    for b in ALL_SIGNS {
        print!(" {b}");
    }
    println!();
    println!("----+{}", "--".repeat(ALL_SIGNS.len()));
    for a in ALL_SIGNS {
        print!("  {a} |");
        for b in ALL_SIGNS {
            print!(" {}", op(a, b));
        }
        println!();
    }
    println!();
}

fn main() {
    table("(x)", Sign::product);
    table("(+)", Sign::sum);

    // '0' is the identity of the sum, so an empty fold is '0'
    let folds: [&[Sign]; 4] = [
        &[],
        &[Sign::Plus, Sign::Zero, Sign::Plus],
        &[Sign::Minus, Sign::Plus],
        &[Sign::Minus, Sign::Zero],
    ];
    for signs in folds {
        let shown: Vec<String> = signs.iter().map(ToString::to_string).collect();
        println!(
            "sum [{}] = {}",
            shown.join(", "),
            sum_all(signs.iter().copied())
        );
    }

    // a chain of influences multiplies its signs
    let chain = [Sign::Minus, Sign::Minus, Sign::Plus];
    let effect = chain.iter().fold(Sign::Plus, |acc, s| acc.product(*s));
    println!("chain - - + carries {effect}");
}
