use std::sync::Arc;

use netbench_service::wire::{ActionJson, ErrorJson, ReplyJson, SnapshotJson};
use netbench_service::{router, ServiceConfig, SessionStore};
use reqwest::{Client, StatusCode};
use serde_json::json;
use tokio::net::TcpListener;

async fn start(static_dir: Option<std::path::PathBuf>) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let app = router(Arc::new(SessionStore::new(ServiceConfig::default())), static_dir);
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    format!("http://{addr}")
}

async fn create(client: &Client, base: &str, body: serde_json::Value) -> (StatusCode, serde_json::Value) {
    let resp = client.post(format!("{base}/api/v1/sessions")).json(&body).send().await.unwrap();
    (resp.status(), resp.json().await.unwrap())
}

async fn reply(client: &Client, base: &str, id: &str, answer: &str) -> (StatusCode, serde_json::Value) {
    let resp = client
        .post(format!("{base}/api/v1/sessions/{id}/reply"))
        .json(&json!({ "answer": answer }))
        .send()
        .await
        .unwrap();
    (resp.status(), resp.json().await.unwrap())
}

async fn snapshot(client: &Client, base: &str, id: &str) -> (StatusCode, serde_json::Value) {
    let resp = client.get(format!("{base}/api/v1/sessions/{id}")).send().await.unwrap();
    (resp.status(), resp.json().await.unwrap())
}

#[tokio::test]
async fn scripted_driver_completes_water_dialog() {
    let base = start(None).await;
    let client = Client::new();
    let (status, body) = create(&client, &base, json!({ "builtin": "water" })).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(
        body["action"],
        json!({ "kind": "ask", "slot": "location", "prompt": "location?", "answers": ["cityA", "cityB"] })
    );
    assert_eq!(body["remaining"], json!(4));
    assert_eq!(body["value"], json!("0"));
    let id = body["session_id"].as_str().unwrap().to_string();

    let (status, body) = reply(&client, &base, &id, "cityB").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["action"]["slot"], json!("purpose"));
    assert_eq!(body["value"], json!("-1"));

    let (status, body) = reply(&client, &base, &id, "drink").await;
    assert_eq!(status, StatusCode::OK);
    let done: ReplyJson = serde_json::from_value(body.clone()).unwrap();
    assert_eq!(done.action, ActionJson::Stop);
    assert_eq!(done.value, "6");
    assert_eq!(done.remaining, 0);
    assert_eq!(
        body["actions"][0],
        json!({ "kind": "act", "op": "run_waterdata__cityB__drink", "message": "Looked up waterdata for location=cityB, purpose=drink." })
    );
    assert_eq!(body["actions"][1]["message"], json!("Water in cityB is checked for drink use."));

    let (status, body) = snapshot(&client, &base, &id).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["value"], json!("6"));
    assert_eq!(body["status"], json!("finished"));
    let turns = body["turns"].as_array().unwrap();
    assert_eq!(turns.len(), 4);
    assert_eq!(
        turns[0],
        json!({ "index": 0, "op": "ask_location", "cost": "1", "utility": "0", "weight": "1", "contribution": "-1",
                "kind": "ask", "message": "location? cityB", "diverged": true })
    );
    let kinds: Vec<&str> = turns.iter().map(|t| t["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["ask", "ask", "act", "act"]);

    let (again_status, again) = snapshot(&client, &base, &id).await;
    assert_eq!((again_status, &again), (status, &body));

    let (status, body) = reply(&client, &base, &id, "cityA").await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["error"]["kind"], json!("conflict"));
}

#[tokio::test]
async fn illegal_answer_is_rejected_with_allowed_set() {
    let base = start(None).await;
    let client = Client::new();
    let (_, body) = create(&client, &base, json!({ "builtin": "water" })).await;
    let id = body["session_id"].as_str().unwrap().to_string();
    let (_, before) = snapshot(&client, &base, &id).await;

    let (status, body) = reply(&client, &base, &id, "ocean").await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let err: ErrorJson = serde_json::from_value(body).unwrap();
    assert_eq!(err.error.kind, "illegal_answer");
    assert_eq!(err.error.allowed, ["cityA", "cityB"]);

    let (_, after) = snapshot(&client, &base, &id).await;
    assert_eq!(before, after);
}

#[tokio::test]
async fn error_statuses() {
    let base = start(None).await;
    let client = Client::new();
    let (status, body) = snapshot(&client, &base, "0123").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["error"]["kind"], json!("not_found"));
    let (status, _) = reply(&client, &base, "0123", "x").await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, body) = create(&client, &base, json!({ "spec": "dialog d\nturns 2\nslot s { answers: a }\n" })).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["kind"], json!("parse"));
    assert_eq!((body["error"]["line"].as_u64(), body["error"]["column"].as_u64()), (Some(3), Some(8)));

    let (status, body) = create(&client, &base, json!({ "builtin": "ocean" })).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["allowed"], json!(["water"]));

    let (status, _) = create(&client, &base, json!({ "builtin": "water", "spec": "x" })).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let resp = client.post(format!("{base}/api/v1/sessions")).body("{not json").send().await.unwrap();
    assert_eq!(resp.status(), StatusCode::BAD_REQUEST);
    let body: ErrorJson = resp.json().await.unwrap();
    assert_eq!(body.error.kind, "bad_request");
}

#[tokio::test]
async fn spec_text_with_empty_optimum_stops_immediately() {
    let base = start(None).await;
    let client = Client::new();
    let text = "dialog d\nturns 3\nslot s { prompt: \"?\" ; answers: a ; cost: 5 }\nquery q { requires: s ; cost: 0 ; utility: 1 }\n";
    let (status, body) = create(&client, &base, json!({ "spec": text })).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(body["action"], json!({ "kind": "stop" }));
    assert_eq!(body["value"], json!("0"));
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_drivers_do_not_interfere() {
    let base = start(None).await;
    let barrier = Arc::new(tokio::sync::Barrier::new(16));
    let mut handles = Vec::new();
    for i in 0..16usize {
        let base = base.clone();
        let barrier = Arc::clone(&barrier);
        handles.push(tokio::spawn(async move {
            let client = Client::new();
            let location = if i % 2 == 0 { "cityA" } else { "cityB" };
            let purpose = if (i / 2) % 2 == 0 { "drink" } else { "irrigate" };
            let (_, body) = create(&client, &base, json!({ "builtin": "water" })).await;
            let id = body["session_id"].as_str().unwrap().to_string();
            barrier.wait().await;
            let (s1, _) = reply(&client, &base, &id, location).await;
            tokio::task::yield_now().await;
            let (s2, body) = reply(&client, &base, &id, purpose).await;
            assert_eq!((s1, s2), (StatusCode::OK, StatusCode::OK));
            assert_eq!(body["value"], json!("6"));
            let (_, snap) = snapshot(&client, &base, &id).await;
            let snap: SnapshotJson = serde_json::from_value(snap).unwrap();
            assert_eq!(snap.turns.len(), 4);
            assert_eq!(snap.turns[2].op, format!("run_waterdata__{location}__{purpose}"));
            assert_eq!(snap.bindings.get("location").map(String::as_str), Some(location));
            assert_eq!(snap.bindings.get("purpose").map(String::as_str), Some(purpose));
            id
        }));
    }
    let mut ids = Vec::new();
    for h in handles {
        ids.push(h.await.unwrap());
    }
    ids.sort();
    ids.dedup();
    assert_eq!(ids.len(), 16);
}

#[tokio::test]
async fn serves_static_files() {
    let dir = std::env::temp_dir().join(format!("netbench-static-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("index.html"), "<p>chat</p>").unwrap();
    let base = start(Some(dir.clone())).await;
    let text = Client::new().get(format!("{base}/index.html")).send().await.unwrap().text().await.unwrap();
    assert_eq!(text, "<p>chat</p>");
    std::fs::remove_dir_all(dir).unwrap();
}
