"""trait-embed: write TREM embedding files for the trait engine."""

import argparse
import sys

from embedprep.corpus import CorpusFormatError
from embedprep.encoders import EncoderError
from embedprep.job import EmbeddingJob, embed_sentences, embed_words


def build_parser():
    parser = argparse.ArgumentParser(
        prog="trait-embed",
        description="Encode corpus sentences or vocabulary terms into the "
                    "engine's TREM embedding format.")
    parser.add_argument("--corpus", required=True, help="corpus JSONL file")
    parser.add_argument("--mode", choices=["sentence", "word"], required=True)
    parser.add_argument("--encoder", default="hash",
                        help="encoder id: hash (default), hash-<dim>, or st:<model>")
    parser.add_argument("--out", required=True, help="output .trem path")
    parser.add_argument("--dim", type=int, default=256,
                        help="dimension for the hash encoder")
    parser.add_argument("--batch-size", type=int, default=32)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    job = EmbeddingJob(corpus_path=args.corpus, mode=args.mode,
                       encoder_id=args.encoder, output_path=args.out,
                       batch_size=args.batch_size, dim=args.dim)
    try:
        count = (embed_sentences if args.mode == "sentence" else embed_words)(job)
    except (EncoderError, CorpusFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"trait-embed: wrote {count} {args.mode} vectors to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
