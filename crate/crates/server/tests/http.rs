use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use necklace_server::{router, AppState};

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, value)
}

async fn create(app: &Router, body: Value) -> String {
    let (status, game) = call(app, Method::POST, "/games", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED, "{game}");
    game["id"].as_str().unwrap().to_string()
}

fn error_code(v: &Value) -> &str {
    v["error"]["code"].as_str().unwrap()
}

#[tokio::test]
async fn create_and_fetch() {
    let app = router(AppState::new());
    let body = json!({"family": "NN", "n": 5, "k": 3, "heights": [3, 1, 2, 1, 3], "first": "human"});
    let (status, game) = call(&app, Method::POST, "/games", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(game["status"]["state"], "ongoing");
    assert_eq!(game["to_move"], "human");
    assert_eq!(game["label"], "NN(5,3)");
    assert_eq!(game["move_sets"], json!([[1, 2, 3], [2, 3, 4], [3, 4, 5], [1, 5]]));

    let id = game["id"].as_str().unwrap();
    let (status, fetched) = call(&app, Method::GET, &format!("/games/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(fetched, game);

    let (status, err) = call(&app, Method::GET, "/games/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(error_code(&err), "not_found");
}

#[tokio::test]
async fn bad_starts_are_rejected() {
    let app = router(AppState::new());
    let cases = [
        (json!({"family": "NN", "n": 5, "k": 3, "heights": [0, 0, 0, 0, 0]}), "terminal_start"),
        (json!({"family": "NN", "n": 5, "heights": [1, 1, 1, 1, 1]}), "invalid_parameters"),
        (json!({"family": "NN", "n": 5, "k": 3, "heights": [1, 1]}), "invalid_position"),
        (json!({"family": "NN", "n": 5, "k": 3}), "invalid_position"),
        (json!({"family": "NN", "n": 5, "k": 3, "heights": [1, 1, 1, 1, 1], "first": "nobody"}), "bad_request"),
    ];
    for (body, code) in cases {
        let (status, err) = call(&app, Method::POST, "/games", Some(body.clone())).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
        assert_eq!(error_code(&err), code, "{body}: {err}");
    }
}

#[tokio::test]
async fn illegal_moves_name_the_violation() {
    let app = router(AppState::new());
    let id = create(&app, json!({"family": "NN", "n": 5, "k": 3, "heights": [3, 1, 2, 1, 3]})).await;
    let uri = format!("/games/{id}/moves");
    let cases = [
        (json!({"set": 1, "removals": [4, 0, 0, 0, 0]}), "holds 3"),
        (json!({"set": 1, "removals": [0, 0, 0, 0, 0]}), "at least one token"),
        (json!({"set": 1, "removals": [0, 0, 0, 1, 0]}), "outside move set"),
        (json!({"set": 9, "removals": [1, 0, 0, 0, 0]}), "does not exist"),
    ];
    for (body, needle) in cases {
        let (status, err) = call(&app, Method::POST, &uri, Some(body.clone())).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
        assert_eq!(error_code(&err), "illegal_move");
        assert!(err["error"]["message"].as_str().unwrap().contains(needle), "{err}");
    }
    let (status, _) = call(&app, Method::POST, &uri, Some(json!({"set": 0, "removals": [1, 0, 0, 0, 0]}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    // the position is untouched by rejected moves
    let (_, game) = call(&app, Method::GET, &format!("/games/{id}"), None).await;
    assert_eq!(game["position"], json!([3, 1, 2, 1, 3]));
    assert_eq!(game["history"], json!([]));
}

#[tokio::test]
async fn turns_and_game_over_conflict() {
    let app = router(AppState::new());
    let id = create(&app, json!({"family": "NN", "n": 4, "k": 2, "heights": [1, 1, 0, 0]})).await;
    let (status, err) = call(&app, Method::POST, &format!("/games/{id}/engine-move"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(error_code(&err), "wrong_turn");

    let (status, game) = call(
        &app,
        Method::POST,
        &format!("/games/{id}/moves"),
        Some(json!({"set": 1, "removals": [1, 1, 0, 0]})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(game["status"], json!({"state": "won", "winner": "human"}));

    let (status, err) = call(&app, Method::POST, &format!("/games/{id}/engine-move"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(error_code(&err), "game_over");
}

#[tokio::test]
async fn hint_and_engine_move_follow_the_constructive_strategy() {
    let app = router(AppState::new());
    let heights = json!([2, 15, 8, 4, 5, 4, 5, 5, 5, 8]);
    let id = create(&app, json!({"family": "NN", "n": 10, "k": 5, "heights": heights, "first": "engine"})).await;

    let (status, hint) = call(&app, Method::GET, &format!("/games/{id}/hint"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(hint["outcome"], "N");
    assert_eq!(hint["move"]["move"]["set"], 3);
    assert_eq!(hint["move"]["removals"], json!([0, 0, 5, 4, 5, 4, 3, 0, 0, 0]));
    assert_eq!(hint["move"]["route"], "constructive");

    let (status, reply) = call(&app, Method::POST, &format!("/games/{id}/engine-move"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(reply["winning"], true);
    assert_eq!(reply["move"], json!({"set": 3, "removals": [0, 0, 5, 4, 5, 4, 3, 0, 0, 0]}));
    assert_eq!(reply["game"]["position"], json!([2, 15, 3, 0, 0, 0, 2, 5, 5, 8]));
    assert_eq!(reply["game"]["to_move"], "human");

    let (_, analysis) = call(&app, Method::GET, &format!("/games/{id}/analysis?hint=true"), None).await;
    assert_eq!(analysis["outcome"], "P");
    assert_eq!(analysis["SE"], true);
    assert_eq!(analysis["ME"], true);
    assert_eq!(analysis["hint"]["message"], "no winning move exists");
}

#[tokio::test]
async fn analysis_of_an_n_position() {
    let app = router(AppState::new());
    let id = create(&app, json!({"family": "NN", "n": 10, "k": 5, "heights": [4, 21, 3, 2, 3, 4, 2, 7, 6, 5]})).await;
    let (status, a) = call(&app, Method::GET, &format!("/games/{id}/analysis"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!((a["outcome"].clone(), a["Delta"].clone(), a["delta"].clone()), (json!("N"), json!(9), json!(7)));
    assert_eq!(a["source"], "closed_form");
    assert!(a.get("hint").is_none());
}

#[tokio::test]
async fn generic_games_get_oracle_reports() {
    let app = router(AppState::new());
    let id = create(
        &app,
        json!({"family": "SET", "n": 3, "move_sets": [[1, 2], [2, 3]], "heights": [1, 2, 1], "first": "engine"}),
    )
    .await;
    let (_, a) = call(&app, Method::GET, &format!("/games/{id}/analysis"), None).await;
    assert_eq!(a["source"], "oracle");
    assert!(a.get("SE").is_none() && a.get("predicate").is_none());
    let (status, reply) = call(&app, Method::POST, &format!("/games/{id}/engine-move"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(reply["strategy"]["route"], "oracle");
}

#[tokio::test]
async fn engine_at_a_p_position_stalls() {
    let app = router(AppState::new());
    let id = create(&app, json!({"family": "NN", "n": 4, "k": 2, "heights": [1, 2, 1, 2], "first": "engine"})).await;
    let (status, reply) = call(&app, Method::POST, &format!("/games/{id}/engine-move"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(reply["winning"], false);
    assert_eq!(reply["message"], "no winning move exists");
    assert_eq!(reply["move"], json!({"set": 1, "removals": [0, 1, 0, 0]}));
}

#[tokio::test]
async fn snapshots_survive_a_restart() {
    let dir = std::env::temp_dir().join(format!("necklace-snapshots-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let app = router(AppState::new().with_snapshots(dir.clone()).unwrap());
    let id = create(&app, json!({"family": "NN", "n": 6, "k": 3, "heights": [2, 1, 3, 0, 2, 2]})).await;
    call(&app, Method::POST, &format!("/games/{id}/moves"), Some(json!({"set": 2, "removals": [0, 1, 2, 0, 0, 0]}))).await;
    let (_, before) = call(&app, Method::POST, &format!("/games/{id}/engine-move"), None).await;

    let state = AppState::new().with_snapshots(dir.clone()).unwrap();
    assert_eq!(state.session_count(), 1);
    let (status, after) = call(&router(state), Method::GET, &format!("/games/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(after, before["game"]);
    std::fs::remove_dir_all(&dir).unwrap();
}
