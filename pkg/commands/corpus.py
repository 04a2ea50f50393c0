# commands/corpus.py
"""corpus：重新生成黄金语料"""
import hashlib
import json

from commands.common import CommandResult, check
from config import ProbeConfig
from services.corpus import generate_corpus

NAME = "corpus"
MIN_ARTIFACTS = 12


def add_parser(subparsers, parents):
    parser = subparsers.add_parser(NAME, parents=parents, help="生成确定性的黄金语料与 manifest")
    parser.add_argument("--out-dir", required=True, help="输出目录")
    parser.set_defaults(handler=handle)
    return parser


def handle(args, config: ProbeConfig) -> CommandResult:
    manifest = generate_corpus(args.out_dir, config.SEED)
    artifacts = json.loads(manifest.read_text(encoding="utf-8"))["artifacts"]
    digest = hashlib.sha256(manifest.read_bytes()).hexdigest()
    return CommandResult(
        [check("artifacts", len(artifacts) >= MIN_ARTIFACTS, count=len(artifacts), manifest_sha256=digest)]
    )
