use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use fracgame::format::{parse_hypergraph, parse_move};
use fracgame::harness::enumerate_hypergraphs;
use fracgame::{is_fully_covered, is_legal_move, parse_rational, rat, solve, GameSpec, Hypergraph, LoadVector, Player, Rational};
use fracgame_cli::service::{router, AppState};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

const C4_EDGES: [[usize; 2]; 4] = [[0, 1], [1, 2], [2, 3], [3, 0]];

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, value)
}

async fn create(app: &Router, body: Value) -> Value {
    let (status, view) = call(app, "POST", "/session", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED, "{view}");
    view
}

async fn submove(app: &Router, id: &str, vertex: usize, weight: &str) -> (StatusCode, Value) {
    call(app, "POST", &format!("/session/{id}/submove"), Some(json!({"vertex": vertex, "weight": weight}))).await
}

fn q(v: &Value) -> Rational {
    parse_rational(v.as_str().unwrap_or_else(|| panic!("{v} is not a p/q string"))).unwrap()
}

fn c4_session(human: &str, starter: &str) -> Value {
    json!({"n": 4, "edges": C4_EDGES, "grid": 4, "starter": starter, "human_role": human})
}

fn quarters() -> Value {
    json!([[
        {"vertex": 0, "weight": "1/4"},
        {"vertex": 1, "weight": "1/4"},
        {"vertex": 2, "weight": "1/4"},
        {"vertex": 3, "weight": "1/4"}
    ]])
}

/// Plays the hint until the game ends and returns the final view.
async fn follow_hints(app: &Router, id: &str) -> Value {
    loop {
        let (_, view) = call(app, "GET", &format!("/session/{id}"), None).await;
        if view["game_over"] == true {
            return view;
        }
        assert_eq!(view["human_turn"], true);
        let (status, hint) = call(app, "POST", &format!("/session/{id}/hint"), None).await;
        assert_eq!(status, StatusCode::OK, "{hint}");
        let (status, body) = submove(app, id, hint["vertex"].as_u64().unwrap() as usize, hint["weight"].as_str().unwrap()).await;
        assert_eq!(status, StatusCode::OK, "{body}");
    }
}

#[tokio::test]
async fn engine_opens_and_state_is_exposed_as_strings() {
    let app = router(AppState::default());
    let view = create(&app, c4_session("staller", "edge-hitter")).await;
    assert_eq!(view["history"].as_array().unwrap().len(), 1);
    assert_eq!(view["history"][0]["player"], "edge-hitter");
    assert_eq!(view["history"][0]["total"], "1");
    assert_eq!((view["spent"].clone(), view["budget"].clone()), (json!("1"), json!("1")));
    assert_eq!(view["human_turn"], true);
    assert_eq!(view["mover"], "staller");
    assert_eq!(view["predicted_value"], "5/2");
    let loads: Vec<Rational> = view["loads"].as_array().unwrap().iter().map(q).collect();
    assert_eq!(loads.iter().sum::<Rational>(), rat(2, 1));
    let (status, again) = call(&app, "GET", &format!("/session/{}", view["id"].as_str().unwrap()), None).await;
    assert_eq!((status, again), (StatusCode::OK, view));
}

#[tokio::test]
async fn scripted_c4_line() {
    let app = router(AppState::default());
    let mut body = c4_session("staller", "edge-hitter");
    body["opening"] = quarters();
    let view = create(&app, body).await;
    let id = view["id"].as_str().unwrap();
    assert_eq!(view["loads"], json!(["1/2", "1/2", "1/2", "1/2"]));
    // The quarters opening is optimal: the prediction stays at the game value.
    assert_eq!(view["predicted_value"], "5/2");

    let (status, first) = submove(&app, id, 1, "1/2").await;
    assert_eq!(status, StatusCode::OK, "{first}");
    assert_eq!(first["human_move_complete"], false);
    assert_eq!(first["engine_reply"], Value::Null);
    assert_eq!(first["state"]["budget"], "1/2");

    let (status, second) = submove(&app, id, 2, "1/2").await;
    assert_eq!(status, StatusCode::OK, "{second}");
    assert_eq!(second["human_move_complete"], true);
    assert_eq!(second["engine_reply"]["total"], "1/2");
    assert_eq!(second["engine_reply"]["player"], "edge-hitter");
    let state = &second["state"];
    assert_eq!((state["game_over"].clone(), state["spent"].clone()), (json!(true), json!("5/2")));
    assert_eq!(second["predicted_value"], "5/2");
    let (_, view) = call(&app, "GET", &format!("/session/{id}"), None).await;
    assert_eq!(&view, state);
}

#[tokio::test]
async fn scripted_modified_c4_line() {
    let app = router(AppState::default());
    let mut edges: Vec<Vec<usize>> = C4_EDGES.iter().map(|e| e.to_vec()).collect();
    edges.extend([vec![0, 1, 4], vec![1, 2, 5], vec![2, 3, 6], vec![3, 0, 7]]);
    let body = json!({
        "n": 8, "edges": edges, "grid": 4, "starter": "edge-hitter", "human_role": "staller", "opening": quarters()
    });
    let view = create(&app, body).await;
    let id = view["id"].as_str().unwrap();
    assert_eq!(view["predicted_value"], "3");
    submove(&app, id, 4, "1/2").await;
    let (status, out) = submove(&app, id, 6, "1/2").await;
    assert_eq!(status, StatusCode::OK, "{out}");
    assert_eq!(out["engine_reply"]["total"], "1");
    assert_eq!(out["state"]["game_over"], true);
    assert_eq!(out["state"]["spent"], "3");
}

#[tokio::test]
async fn hint_following_sessions_reach_the_solve_value() {
    let app = router(AppState::default());
    let c4 = Hypergraph::new(4, C4_EDGES.iter().map(|e| e.to_vec()).collect()).unwrap();
    for (human, starter) in [("staller", "edge-hitter"), ("edge-hitter", "edge-hitter"), ("staller", "staller"), ("edge-hitter", "staller")] {
        let view = create(&app, c4_session(human, starter)).await;
        let end = follow_hints(&app, view["id"].as_str().unwrap()).await;
        let who = if starter == "staller" { Player::Staller } else { Player::EdgeHitter };
        let want = solve(&GameSpec::new(c4.clone(), who, 4)).unwrap().value;
        assert_eq!(q(&end["spent"]), want, "{human} {starter}");
    }
}

#[tokio::test]
async fn domination_session() {
    let app = router(AppState::default());
    let star = json!([[0, 1], [0, 2], [0, 3]]);
    for (starter, want) in [("edge-hitter", "1"), ("staller", "2")] {
        let body = json!({"n": 4, "edges": star, "variant": "domination", "grid": 2, "starter": starter, "human_role": "staller"});
        let view = create(&app, body).await;
        assert_eq!(view["edges"].as_array().unwrap().len(), 4);
        let end = follow_hints(&app, view["id"].as_str().unwrap()).await;
        assert_eq!(end["spent"], want);
    }
}

#[tokio::test]
async fn forced_hints_carry_the_greedy_weight() {
    let app = router(AppState::default());
    let mut forced = 0;
    for h in enumerate_hypergraphs(3, 3).unwrap() {
        for (human, starter) in [("staller", "edge-hitter"), ("edge-hitter", "staller"), ("staller", "staller")] {
            let body = json!({"n": h.n(), "edges": h.edges(), "grid": 2, "starter": starter, "human_role": human});
            let view = create(&app, body).await;
            let id = view["id"].as_str().unwrap().to_string();
            loop {
                let (_, view) = call(&app, "GET", &format!("/session/{id}"), None).await;
                if view["game_over"] == true {
                    break;
                }
                let (_, hint) = call(&app, "POST", &format!("/session/{id}/hint"), None).await;
                let v = hint["vertex"].as_u64().unwrap() as usize;
                if hint["forced"] == true {
                    forced += 1;
                    // Every slot before the hinted one is zero, so the greedy
                    // weight is w_max at the current loads and budget.
                    let loads: Vec<Rational> = view["loads"].as_array().unwrap().iter().map(q).collect();
                    let slack = h
                        .edges()
                        .iter()
                        .zip(&loads)
                        .filter(|(e, _)| e.contains(&v))
                        .map(|(_, x)| rat(1, 1) - x)
                        .max()
                        .unwrap();
                    assert_eq!(q(&hint["weight"]), slack.min(q(&view["budget"])), "{} {hint}", h.id());
                }
                let (status, out) = submove(&app, &id, v, hint["weight"].as_str().unwrap()).await;
                assert_eq!(status, StatusCode::OK, "{out}");
            }
        }
    }
    assert!(forced > 0, "no forced hints on the corpus");
}

#[tokio::test]
async fn illegal_submoves_are_rejected_with_the_condition() {
    let app = router(AppState::default());
    let mut body = c4_session("staller", "edge-hitter");
    body["opening"] = quarters();
    let view = create(&app, body).await;
    let id = view["id"].as_str().unwrap();

    let (status, err) = submove(&app, id, 1, "3/4").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!((err["error"].clone(), err["violation"].clone()), (json!("IllegalSubmove"), json!("no-absorbing-edge")));
    assert_eq!(err["max_permitted"], "1/2");

    let (status, err) = submove(&app, id, 1, "1/3").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["violation"], "off-grid");
    assert_eq!(err["suggestions"], json!(["1/4", "1/2"]));

    submove(&app, id, 1, "1/4").await;
    let (status, err) = submove(&app, id, 3, "1/2").await;
    assert_eq!(status, StatusCode::OK, "{err}");
    let (status, err) = submove(&app, id, 0, "1/2").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!((err["violation"].clone(), err["max_permitted"].clone()), (json!("budget-exceeded"), json!("1/4")));

    let (status, err) = submove(&app, id, 9, "1/4").await;
    assert_eq!((status, err["violation"].clone()), (StatusCode::BAD_REQUEST, json!("vertex-out-of-range")));
    let (status, err) = submove(&app, id, 0, "abc").await;
    assert_eq!((status, err["error"].clone()), (StatusCode::BAD_REQUEST, json!("InvalidRequest")));
    let (_, view) = call(&app, "GET", &format!("/session/{id}"), None).await;
    assert_eq!(view["current_move"], json!([{"vertex": 1, "weight": "1/4"}, {"vertex": 3, "weight": "1/2"}]));
}

#[tokio::test]
async fn unknown_sessions_and_finished_games() {
    let app = router(AppState::default());
    let (status, err) = call(&app, "GET", "/session/nope", None).await;
    assert_eq!((status, err["error"].clone()), (StatusCode::NOT_FOUND, json!("UnknownSession")));
    let (status, _) = submove(&app, "nope", 0, "1").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&app, "POST", "/session/nope/hint", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let mut body = c4_session("staller", "edge-hitter");
    body["opening"] = quarters();
    let id = create(&app, body).await["id"].as_str().unwrap().to_string();
    submove(&app, &id, 1, "1/2").await;
    submove(&app, &id, 2, "1/2").await;
    let (status, err) = submove(&app, &id, 0, "1/4").await;
    assert_eq!(status, StatusCode::CONFLICT, "{err}");
    let (status, _) = call(&app, "POST", &format!("/session/{id}/hint"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn invalid_creation_requests() {
    let app = router(AppState::default());
    let (status, _) = call(&app, "POST", "/session", Some(json!({"n": 2}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let bad_edge = json!({"n": 2, "edges": [[0, 5]], "grid": 2, "starter": "staller", "human_role": "staller"});
    assert_eq!(call(&app, "POST", "/session", Some(bad_edge)).await.0, StatusCode::BAD_REQUEST);
    let mut body = c4_session("staller", "edge-hitter");
    body["grid"] = json!(0);
    assert_eq!(call(&app, "POST", "/session", Some(body)).await.0, StatusCode::BAD_REQUEST);
    let mut body = c4_session("staller", "edge-hitter");
    body["opening"] = json!([[{"vertex": 0, "weight": "1/2"}]]);
    let (status, err) = call(&app, "POST", "/session", Some(body)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(err["message"].as_str().unwrap().contains("unspent"), "{err}");
    let mut body = c4_session("staller", "edge-hitter");
    body["preload"] = json!(["1/2", "1/2", "1/2", "1/2"]);
    let view = create(&app, body).await;
    assert_eq!(view["spent"], "1");
    assert_eq!(view["history"][0]["total"], "1");
}

#[tokio::test]
async fn sessions_are_independent() {
    let app = router(AppState::default());
    let a = create(&app, c4_session("staller", "edge-hitter")).await;
    let b = create(&app, c4_session("staller", "edge-hitter")).await;
    assert_ne!(a["id"], b["id"]);
    follow_hints(&app, a["id"].as_str().unwrap()).await;
    let (_, now) = call(&app, "GET", &format!("/session/{}", b["id"].as_str().unwrap()), None).await;
    assert_eq!(now, b);
}

#[tokio::test]
async fn replay_files_replay_legally() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::new(Some(dir.path().to_path_buf())));
    let mut edges: Vec<Vec<usize>> = C4_EDGES.iter().map(|e| e.to_vec()).collect();
    edges.push(vec![0, 2]);
    let body = json!({"n": 4, "edges": edges, "grid": 2, "starter": "staller", "human_role": "edge-hitter"});
    let view = create(&app, body).await;
    let id = view["id"].as_str().unwrap();
    let end = follow_hints(&app, id).await;

    let text = std::fs::read_to_string(dir.path().join(format!("{id}.moves"))).unwrap();
    let file = parse_hypergraph("n 4\ne 0 1\ne 1 2\ne 2 3\ne 3 0\ne 0 2\n").unwrap();
    let blocks: Vec<&str> = text.split("# move ").skip(1).collect();
    assert_eq!(blocks.len(), end["history"].as_array().unwrap().len());
    let mut loads = LoadVector::zeros(file.h.m());
    let mut total = Rational::from_integer(0.into());
    for block in blocks {
        let body = block.split_once('\n').unwrap().1;
        let mv = parse_move(body, &file).unwrap();
        assert!(is_legal_move(&file.h, &loads, &mv).is_legal());
        total += mv.total_weight();
        loads = mv.apply(&file.h, &loads).unwrap();
    }
    assert!(is_fully_covered(&loads));
    assert_eq!(total, q(&end["spent"]));
    let rendered: Vec<Rational> = end["loads"].as_array().unwrap().iter().map(q).collect();
    assert_eq!(loads.values(), &rendered[..]);
}
