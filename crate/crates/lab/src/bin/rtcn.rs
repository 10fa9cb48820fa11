fn main() {
    let args = std::env::args().skip(1).collect();
    let code = rtcn_lab::cli::run(
        args,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
