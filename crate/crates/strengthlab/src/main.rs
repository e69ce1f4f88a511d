use std::io::Write;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let code = std::panic::catch_unwind(|| {
        let mut out = std::io::stdout();
        let mut err = std::io::stderr();
        let code = strengthlab::cli::run(&args, &mut out, &mut err);
        let _ = out.flush();
        code
    })
    .unwrap_or_else(|_| {
        // exit 1 is reserved for internal invariant violations
        let _ = writeln!(std::io::stderr(), "internal error");
        1
    });
    std::process::exit(code);
}
