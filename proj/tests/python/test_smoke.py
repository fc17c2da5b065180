"""Smoke tests for the python bindings; run with PYTHONPATH pointing at the
built extension and the python/ package dir."""

import rtlforge


def test_lexing():
    assert rtlforge.lex_tokens("module m; endmodule") == ["module", "m", ";", "endmodule"]
    assert rtlforge.lex_tokens("assign y = a & b;") == ["assign", "y", "=", "a", "&", "b", ";"]


def test_jaccard():
    assert rtlforge.jaccard("a b c d e f", "a b c d e f") == 1.0
    assert abs(rtlforge.jaccard("a b c d e f", "a b c d e g") - 1.0 / 3.0) < 1e-12
    assert rtlforge.shingle_count("a b c d") == 0


def test_syntax():
    assert rtlforge.check_syntax("module m; endmodule")
    assert not rtlforge.check_syntax("module m; endmodul")


def test_pass_at_k():
    assert rtlforge.pass_at_k(10, 10, 1) == 1.0
    assert abs(rtlforge.pass_at_k(10, 1, 5) - 0.5) < 1e-12
    assert abs(rtlforge.pass_at_k(10, 3, 5) - (1.0 - 21.0 / 252.0)) < 1e-12


def test_prompts():
    prompt = rtlforge.render_problem_prompt("module m; endmodule")
    assert "Do not include the code snippet in the problem" in prompt
    assert "module m; endmodule" in prompt
    assert rtlforge.extract_problem("<PROBLEM>hello</PROBLEM>") == "hello"
    assert rtlforge.extract_problem("nothing") is None


def test_scaling_ops():
    transcript = "PROMPT reasoning</think><answer>module m; endmodule</answer>"
    assert rtlforge.extract_solution(transcript, 6) == "module m; endmodule"
    spliced = rtlforge.splice_corrective(transcript, 6, ["Rule A"])
    assert spliced.startswith("PROMPT reasoning" + "Wait, my reasoning must be incorrect.")
    assert "1. Rule A" in spliced
    truncated = rtlforge.truncate_reasoning("P one. Wait, two. Wait, three.", 2, 0)
    assert truncated == "P one. </think>"


def test_packing():
    result = rtlforge.pack_byte_triples([("ab", "cd", "e")], 16, True)
    chunk = result["chunks"][0]
    assert chunk["ids"][:8] == [97, 98, 256, 99, 100, 257, 101, 258]
    assert chunk["mask"][:8] == [0, 0, 0, 1, 1, 1, 1, 1]
    assert chunk["pad_start"] == 8
    assert result["mask_total"] == 5


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok {test.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    main()
