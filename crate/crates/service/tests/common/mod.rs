#![allow(dead_code)]

use std::net::SocketAddr;
use std::path::Path;
use std::sync::Arc;
use std::thread::JoinHandle;

use crashpbo_service::SessionStore;
use serde_json::{json, Value};
use tokio::sync::oneshot;

/// A real listener on an ephemeral port, driven by its own runtime thread.
pub struct TestServer {
    pub base: String,
    pub store: Arc<SessionStore>,
    stop: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<()>>,
}

impl TestServer {
    pub fn start(dir: &Path) -> TestServer {
        let store = Arc::new(SessionStore::open(dir).unwrap());
        let (stop, stopped) = oneshot::channel::<()>();
        let (ready, addr_rx) = std::sync::mpsc::channel::<SocketAddr>();
        let shared = store.clone();
        let thread = std::thread::spawn(move || {
            let rt =
                tokio::runtime::Builder::new_multi_thread().worker_threads(2).enable_all().build().unwrap();
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
                ready.send(listener.local_addr().unwrap()).unwrap();
                crashpbo_service::serve(listener, shared, Some("*"), async {
                    let _ = stopped.await;
                })
                .await
                .unwrap();
            });
        });
        let addr = addr_rx.recv().unwrap();
        TestServer { base: format!("http://{addr}"), store, stop: Some(stop), thread: Some(thread) }
    }

    pub fn stop(mut self) {
        self.shutdown();
    }

    fn shutdown(&mut self) {
        if let Some(s) = self.stop.take() {
            let _ = s.send(());
        }
        if let Some(t) = self.thread.take() {
            t.join().unwrap();
        }
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }
}

impl Drop for TestServer {
    fn drop(&mut self) {
        self.shutdown();
    }
}

pub fn agent() -> ureq::Agent {
    ureq::Agent::config_builder().http_status_as_error(false).build().into()
}

pub fn get(server: &TestServer, path: &str) -> (u16, Value) {
    let mut r = agent().get(&server.url(path)).call().unwrap();
    let status = r.status().as_u16();
    (status, r.body_mut().read_json().unwrap())
}

pub fn get_text(server: &TestServer, path: &str) -> (u16, String) {
    let mut r = agent().get(&server.url(path)).call().unwrap();
    let status = r.status().as_u16();
    (status, r.body_mut().read_to_string().unwrap())
}

pub fn post(server: &TestServer, path: &str, body: &Value) -> (u16, Value) {
    let mut r = agent().post(&server.url(path)).send_json(body).unwrap();
    let status = r.status().as_u16();
    (status, r.body_mut().read_json().unwrap())
}

pub fn error_code(body: &Value) -> &str {
    body["error"]["code"].as_str().unwrap_or("")
}

/// Two labelled parameters; the initial x_a is preferred.
pub fn create_body(budget: usize, mode: &str) -> Value {
    json!({
        "config": { "dim": 2, "budget": budget, "mode": mode, "seed": 7,
                    "acquisition": { "restarts": 8, "local_steps": 30, "seed": 0 } },
        "labels": [
            { "name": "temperature", "unit": "C", "min": 150.0, "max": 250.0 },
            { "name": "speed", "unit": "mm/s", "min": 10.0, "max": 50.0 }
        ],
        "initial": { "x_a": [200.0, 30.0], "x_b": [160.0, 45.0], "outcome": "prefer_a" }
    })
}

pub fn create(server: &TestServer, body: &Value) -> Value {
    let (status, view) = post(server, "/v1/sessions", body);
    assert_eq!(status, 201, "{view}");
    view
}

pub fn feedback(server: &TestServer, id: &str, token: &str, outcome: &str) -> (u16, Value) {
    post(server, &format!("/v1/sessions/{id}/feedback"), &json!({ "duel_token": token, "outcome": outcome }))
}
