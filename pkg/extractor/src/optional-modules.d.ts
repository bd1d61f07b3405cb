// Optional model-loading dependency; only present when a user installs it
// to run real checkpoints.  The deterministic backend never imports it.
declare module "@huggingface/transformers";
