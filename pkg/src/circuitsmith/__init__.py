"""circuitsmith: natural-language device descriptions to checked electronic designs.

The package is organized around a small immutable data model (`devicespec`),
a tolerant extractor for model output (`specparser`), a component knowledge
base (`partsdb`), pinout scoring (`pinscore`), an electrical rule checker
(`erc`), a record/replay completion gateway (`llmgateway`), the generate ->
parse -> check -> reflect pipeline (`pipeline`), a 25-task benchmark harness
(`bench`), interchange exports (`export`), an HTTP session service
(`service`), and a command-line entry point (`cli`).
"""

__version__ = "0.1.0"
