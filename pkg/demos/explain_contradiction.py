"""Replay the degree-by-degree elimination behind the obstruction, step by step."""
from hochlab.cli import format_transcript_text
from hochlab.obstruction import reproduce_paper_contradiction


def main() -> None:
    tr = reproduce_paper_contradiction()
    print(format_transcript_text(tr), end="")
    print(f"all steps implied by the coboundary system: {tr.consistent}")


if __name__ == "__main__":
    main()
