fn main() { std::process::exit(doubled_polygons::cli::main_entry()) }
