"""
Learns unification grammar rules from a tagged, parsed corpus.
"""
import sys

import definitions
from grammar_learner import cli
from grammar_learner.settings import Config

if __name__ == "__main__":
    # Settings first, the CLI reads its defaults from them
    Config().load(definitions.CONFIG_FILE, meta=definitions.CONFIG_META_FILE)

    sys.exit(cli.main(sys.argv[1:], configure=True))
