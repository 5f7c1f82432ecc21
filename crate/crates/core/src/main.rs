use gallina_scala::cli::{run_styled, Style};

fn main() {
    let code = run_styled(std::env::args_os().skip(1), &mut std::io::stdout(), &mut std::io::stderr(), Style::detect());
    std::process::exit(code);
}
