use std::net::SocketAddr;

use costcurve_service::{app, Settings};

const DEFAULT_BIND: &str = "127.0.0.1:8080";

#[tokio::main]
async fn main() {
    let bind = std::env::var("COSTCURVE_BIND").unwrap_or_else(|_| DEFAULT_BIND.to_string());
    let addr: SocketAddr = match bind.parse() {
        Ok(addr) => addr,
        Err(e) => {
            eprintln!("error: COSTCURVE_BIND `{bind}`: {e}");
            std::process::exit(2);
        }
    };
    let listener = match tokio::net::TcpListener::bind(addr).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: cannot bind {addr}: {e}");
            std::process::exit(1);
        }
    };
    eprintln!("listening on http://{addr}");
    if let Err(e) = axum::serve(listener, app(Settings::from_env())).await {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
