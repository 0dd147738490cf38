"""Format validator, rubric judge, payload rendering, and the harness."""
from __future__ import annotations

import json

from flowagent.backends import BackendRequest, ScriptedBackend
from flowagent.evaluation import (
    AgentConfig,
    EvalConversation,
    EvalTurn,
    FormatProfile,
    FormatRule,
    RubricJudge,
    TurnContext,
    build_basic_architecture,
    check_format,
    evaluate_run,
    judge_accuracy,
    judge_quality,
    load_judge_backend,
    parse_profiles,
    render_accuracy_payload,
    render_quality_payload,
    render_table,
    tools_description,
)
from flowagent.graph import validate_graph
from flowagent.messages import ToolCall, assistant_text, user_message
from flowagent.tools import build_registry

from conftest import FIXTURES, GOLDEN, fixture_path


def emoji_profile() -> FormatProfile:
    return FormatProfile(
        name="emoji_list",
        rules=(
            FormatRule(kind="max_chars", params=(("max", 500),)),
            FormatRule(kind="line_prefix_emoji"),
            FormatRule(kind="no_duplicate_of_tool_cards", params=(("max_title_mentions", 1),)),
        ),
    )


def test_emoji_lines_pass():
    ok, violations = check_format(
        emoji_profile(), assistant_text("n", "\U0001f381 Wine\n\U0001f381 Chocolate")
    )
    assert (ok, violations) == (1, [])


def test_dash_bullet_fails_naming_the_line():
    ok, violations = check_format(emoji_profile(), assistant_text("n", "- Wine"))
    assert ok == 0
    assert violations[0].rule == "line_prefix_emoji"
    assert violations[0].location == "line 1"


def test_max_chars_boundary():
    profile = FormatProfile(name="p", rules=(FormatRule(kind="max_chars", params=(("max", 500),)),))
    assert check_format(profile, assistant_text("n", "x" * 500))[0] == 1
    assert check_format(profile, assistant_text("n", "x" * 501))[0] == 0


def test_forbidden_pattern_and_required_section():
    profile = FormatProfile(
        name="p",
        rules=(
            FormatRule(kind="forbidden_pattern", params=(("pattern", r"(?m)^- "),)),
            FormatRule(kind="required_section", params=(("name", "Brand story"),)),
        ),
    )
    ok, violations = check_format(profile, assistant_text("n", "- listy\nno section"))
    assert ok == 0
    assert {v.rule for v in violations} == {"forbidden_pattern", "required_section"}
    ok, _ = check_format(profile, assistant_text("n", "Brand story: lovely"))
    assert ok == 1


def test_duplicate_tool_cards_detected():
    context = TurnContext(
        tool_results=(
            (
                "recommend_gift",
                {"products": [{"title": "Velvet Shiraz"}, {"title": "Dark Truffle Box"}]},
            ),
        )
    )
    bad = assistant_text("n", "\U0001f381 Velvet Shiraz\n\U0001f381 Dark Truffle Box")
    ok, violations = check_format(emoji_profile(), bad, context)
    assert ok == 0
    assert violations[0].rule == "no_duplicate_of_tool_cards"
    fine = assistant_text("n", "\U0001f381 The Velvet Shiraz is a crowd pleaser")
    assert check_format(emoji_profile(), fine, context)[0] == 1


def test_purchase_results_are_not_cards():
    context = TurnContext(tool_results=(("purchase_gift", {"title": "Velvet Shiraz"}),))
    response = assistant_text("n", "\U0001f389 Velvet Shiraz is ordered")
    profile = FormatProfile(
        name="p",
        rules=(FormatRule(kind="no_duplicate_of_tool_cards", params=(("max_title_mentions", 0),)),),
    )
    assert check_format(profile, response, context)[0] == 1


def test_rule_order_does_not_matter():
    profile = emoji_profile()
    reversed_profile = FormatProfile(name="r", rules=tuple(reversed(profile.rules)))
    response = assistant_text("n", "- Wine\n" + "x" * 600)
    assert check_format(profile, response) == check_format(reversed_profile, response)


# -- rubric judge --------------------------------------------------------------


def run_accuracy(reference: ToolCall, actual: ToolCall, registry) -> tuple[int, str]:
    result = judge_accuracy(
        RubricJudge(),
        tools_description(registry),
        [user_message("gift please")],
        reference,
        actual,
    )
    return result.score, result.reason


def test_rubric_identical_call_scores_one(registry):
    call = ToolCall("recommend_gift", {"occasion": "birthday", "price_max": 50000})
    score, _ = run_accuracy(call, call, registry)
    assert score == 1


def test_rubric_wrong_tool_scores_zero(registry):
    reference = ToolCall("recommend_gift", {"occasion": "birthday"})
    actual = ToolCall("search_products", {"query": "birthday"})
    score, reason = run_accuracy(reference, actual, registry)
    assert score == 0
    assert "wrong tool" in reason


def test_rubric_degenerate_range_scores_zero(registry):
    reference = ToolCall("recommend_gift", {"occasion": "birthday", "price_min": 1, "price_max": 9})
    actual = ToolCall("recommend_gift", {"occasion": "birthday", "price_min": 5, "price_max": 5})
    score, reason = run_accuracy(reference, actual, registry)
    assert score == 0
    assert "range" in reason


def test_rubric_case_variants_are_semantically_similar(registry):
    reference = ToolCall("search_products", {"query": "velvet shiraz"})
    actual = ToolCall("search_products", {"query": "Velvet Shiraz"})
    score, _ = run_accuracy(reference, actual, registry)
    assert score == 1


def test_rubric_quality_paths():
    judge_backend = RubricJudge()
    history = [user_message("hi")]
    exact = judge_quality(judge_backend, history, "All set! \U0001f389", "All set! \U0001f389")
    assert exact.score == 3
    repeated = judge_quality(judge_backend, history, "zzz zzz zzz broken", "All set!")
    assert repeated.score == 1
    paraphrase = judge_quality(
        judge_backend,
        history,
        "Every order includes gift wrapping at no extra cost.",
        "Gift wrapping is included with every order at no extra cost.",
    )
    assert paraphrase.score == 2


# -- payload goldens -----------------------------------------------------------


def test_accuracy_payload_matches_golden(registry):
    fixture = json.loads((FIXTURES / "eval_turns.json").read_text(encoding="utf-8"))
    turn = fixture["turns"][0]
    call = ToolCall(turn["reference_call"]["name"], turn["reference_call"]["arguments"])
    payload = render_accuracy_payload(
        tools_description(registry), [user_message(turn["user_message"])], call, call
    )
    golden = (GOLDEN / "judge_accuracy_payload.txt").read_text(encoding="utf-8")
    assert payload + "\n" == golden


def test_quality_payload_matches_golden():
    fixture = json.loads((FIXTURES / "eval_turns.json").read_text(encoding="utf-8"))
    turn = fixture["turns"][0]
    payload = render_quality_payload(
        [user_message(turn["user_message"])],
        turn["reference_response"],
        turn["reference_response"],
    )
    golden = (GOLDEN / "judge_quality_payload.txt").read_text(encoding="utf-8")
    assert payload + "\n" == golden


def test_judge_prompts_are_loadable_and_untouched():
    from flowagent.evaluation import load_prompt

    accuracy = load_prompt("tool_accuracy.txt")
    assert "The start of the range should not be same as the end of the range." in accuracy
    quality = load_prompt("response_quality.txt")
    assert "Emoji-containing response is considered as good." in quality
    assert "- Score:" in accuracy and "- Score:" in quality


# -- harness -------------------------------------------------------------------


def load_eval_fixture():
    doc = json.loads((FIXTURES / "eval_turns.json").read_text(encoding="utf-8"))
    conversations = []
    for turn in doc["turns"]:
        call = turn.get("reference_call")
        conversations.append(
            EvalConversation(
                id=turn["id"],
                turns=(
                    EvalTurn(
                        user_message=turn["user_message"],
                        reference_response=turn["reference_response"],
                        reference_call=ToolCall(call["name"], call["arguments"]) if call else None,
                        profile_ref=turn.get("profile"),
                    ),
                ),
            )
        )
    return conversations


def eval_profiles():
    config = json.loads((FIXTURES / "config_example.json").read_text(encoding="utf-8"))
    return parse_profiles(config["format_profiles"])


def eval_agent_config(gift_graph, catalog, backend=None, graph=None, architecture="wg"):
    return AgentConfig(
        graph=graph or gift_graph,
        backend=backend or ScriptedBackend.from_file(fixture_path("eval_agent_backend.json")),
        registry_factory=lambda: build_registry(catalog, []),
        format_profiles=eval_profiles(),
        architecture=architecture,
    )


def test_labeled_fixture_scores_exactly(gift_graph, catalog):
    report = evaluate_run(load_eval_fixture(), eval_agent_config(gift_graph, catalog), RubricJudge())
    aggregates = report.aggregates()
    assert abs(aggregates["accuracy_ratio"] - 0.85) < 1e-9
    assert abs(aggregates["format_ratio"] - 0.95) < 1e-9
    assert abs(aggregates["quality_mean"] - 2.9) < 1e-9
    assert report.excluded == 0
    assert len(report.turns) == 20


def test_harness_is_deterministic(gift_graph, catalog):
    first = evaluate_run(load_eval_fixture(), eval_agent_config(gift_graph, catalog), RubricJudge())
    second = evaluate_run(load_eval_fixture(), eval_agent_config(gift_graph, catalog), RubricJudge())
    assert first.to_dict() == second.to_dict()


def test_aggregates_recompute_from_turn_list(gift_graph, catalog):
    report = evaluate_run(load_eval_fixture(), eval_agent_config(gift_graph, catalog), RubricJudge())
    scored = [t for t in report.turns if t.evaluated]
    assert report.aggregates()["accuracy_ratio"] * len(scored) == sum(t.accuracy for t in scored)
    assert report.aggregates()["format_ratio"] * len(scored) == sum(t.format_ok for t in scored)


def test_all_correct_subset_reaches_upper_bound(gift_graph, catalog):
    # Conversations where the agent mirrors the reference exactly.
    correct_ids = {f"t{n:02d}" for n in list(range(1, 11)) + list(range(14, 19))}
    test_set = [c for c in load_eval_fixture() if c.id in correct_ids]
    report = evaluate_run(test_set, eval_agent_config(gift_graph, catalog), RubricJudge())
    assert report.aggregates() == {
        "accuracy_ratio": 1.0,
        "format_ratio": 1.0,
        "quality_mean": 3.0,
    }


def test_empty_test_set_yields_undefined_aggregates(gift_graph, catalog):
    report = evaluate_run([], eval_agent_config(gift_graph, catalog), RubricJudge())
    assert report.aggregates() == {
        "accuracy_ratio": None,
        "format_ratio": None,
        "quality_mean": None,
    }
    assert len(report.turns) == 0


def test_unparseable_judge_excludes_turns(gift_graph, catalog):
    broken_judge = ScriptedBackend(default_output="Score: banana")
    test_set = load_eval_fixture()[:3]
    report = evaluate_run(test_set, eval_agent_config(gift_graph, catalog), broken_judge)
    assert report.excluded == 3
    assert all(not t.evaluated for t in report.turns)
    assert report.aggregates()["accuracy_ratio"] is None


def test_render_table_shape(gift_graph, catalog):
    report = evaluate_run(load_eval_fixture(), eval_agent_config(gift_graph, catalog), RubricJudge())
    table = render_table([report])
    assert "Accuracy" in table
    assert "0.850" in table
    assert "Format Adherence" in table
    assert "2.900" in table


def test_load_judge_backend_variants(tmp_path):
    assert isinstance(load_judge_backend({"type": "rubric"}), RubricJudge)
    path = tmp_path / "judge.json"
    path.write_text(json.dumps({"type": "rules", "default_output": "- Reason: x\n- Score: 1"}))
    backend = load_judge_backend(path)
    assert backend.complete(BackendRequest(system_prompt="s")) == "- Reason: x\n- Score: 1"


def test_basic_architecture_is_valid_and_monolithic(gift_graph):
    basic = build_basic_architecture(gift_graph)
    assert validate_graph(basic) == []
    node_prompts = [
        n.system_prompt
        for n in gift_graph.nodes.values()
        if hasattr(n, "system_prompt")
    ]
    assert len(basic.nodes["chat"].system_prompt) > max(len(p) for p in node_prompts)
    assert set(basic.nodes["chat"].allowed_tools) == {
        "search_products",
        "recommend_gift",
        "get_product_detail",
        "purchase_gift",
        "get_friends_birthdays",
    }
