//! `fetch_prices` against a throwaway local HTTP server.

use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::thread;

use arima_cli::{fetch_prices, ingest_csv, CliError, DatasetSpec, FetchRequest, FillPolicy};
use chrono::NaiveDate;

/// Serves one request with `status` and `body`; returns the URL and a handle
/// yielding the request head.
fn serve_once(status: &'static str, body: String) -> (String, thread::JoinHandle<String>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/prices", listener.local_addr().unwrap());
    let handle = thread::spawn(move || {
        let (mut stream, _) = listener.accept().unwrap();
        let mut head = String::new();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        loop {
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            if line == "\r\n" || line.is_empty() {
                break;
            }
            head.push_str(&line);
        }
        write!(
            stream,
            "HTTP/1.1 {status}\r\nContent-Type: text/csv\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            body.len()
        )
        .unwrap();
        head
    });
    (url, handle)
}

fn start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2015, 9, 1).unwrap()
}

fn request(url: &str) -> FetchRequest<'_> {
    FetchRequest {
        url,
        api_key: Some("k-123"),
        start: start(),
        end: start() + chrono::Days::new(10),
    }
}

#[test]
fn ten_rows_round_trip_through_ingest() {
    let mut body = String::from("date,close\n");
    for i in 0..10u64 {
        body += &format!("{},{}\n", start() + chrono::Days::new(i), 230.0 + i as f64);
    }
    let (url, server) = serve_once("200 OK", body.clone());
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("raw.csv");

    assert_eq!(fetch_prices(&request(&url), &dest).unwrap(), 10);
    let head = server.join().unwrap();
    assert!(head.contains("start=2015-09-01"), "{head}");
    assert!(head.contains("end=2015-09-11"), "{head}");
    assert!(head.to_ascii_lowercase().contains("x-api-key: k-123"), "{head}");
    assert_eq!(std::fs::read_to_string(&dest).unwrap(), body);

    let series = ingest_csv(&DatasetSpec {
        path: dest,
        start_date: start(),
        span_days: 10,
        fill_policy: FillPolicy::Error,
    })
    .unwrap();
    assert_eq!(series.len(), 10);
    assert_eq!(series.values()[9], 239.0);
}

#[test]
fn server_error_is_network_error() {
    let (url, server) = serve_once("500 Internal Server Error", "boom".into());
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("raw.csv");
    match fetch_prices(&request(&url), &dest) {
        Err(CliError::Network(msg)) => assert!(msg.contains("500"), "{msg}"),
        other => panic!("unexpected {other:?}"),
    }
    server.join().unwrap();
    assert!(!dest.exists());
}

#[test]
fn missing_close_column_is_malformed() {
    let (url, server) = serve_once("200 OK", "date,open\n2015-09-01,230.0\n".into());
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("raw.csv");
    assert!(matches!(fetch_prices(&request(&url), &dest), Err(CliError::MalformedResponse(_))));
    server.join().unwrap();
    assert!(!dest.exists());
}

#[test]
fn unreachable_endpoint_is_network_error() {
    // bind then drop to get a port nobody listens on
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let url = format!("http://127.0.0.1:{port}/prices");
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        fetch_prices(&request(&url), &dir.path().join("raw.csv")),
        Err(CliError::Network(_))
    ));
}
