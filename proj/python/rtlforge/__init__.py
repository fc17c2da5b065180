"""RTL reasoning-data toolchain: python surface over the C++ core."""

try:
    # installed wheel: the extension lives inside this package
    from ._rtlforge import (  # noqa: F401
        check_syntax,
        corrective_prompt,
        extract_problem,
        extract_solution,
        jaccard,
        lex_tokens,
        pack_byte_triples,
        pass_at_k,
        render_problem_prompt,
        render_rulegen_prompt,
        render_solution_prompt,
        shingle_count,
        splice_corrective,
        truncate_reasoning,
    )
except ImportError:
    # build tree: the extension sits on PYTHONPATH next to this package
    from _rtlforge import (  # noqa: F401
        check_syntax,
        corrective_prompt,
        extract_problem,
        extract_solution,
        jaccard,
        lex_tokens,
        pack_byte_triples,
        pass_at_k,
        render_problem_prompt,
        render_rulegen_prompt,
        render_solution_prompt,
        shingle_count,
        splice_corrective,
        truncate_reasoning,
    )

__all__ = [
    "check_syntax",
    "corrective_prompt",
    "extract_problem",
    "extract_solution",
    "jaccard",
    "lex_tokens",
    "pack_byte_triples",
    "pass_at_k",
    "render_problem_prompt",
    "render_rulegen_prompt",
    "render_solution_prompt",
    "shingle_count",
    "splice_corrective",
    "truncate_reasoning",
]
