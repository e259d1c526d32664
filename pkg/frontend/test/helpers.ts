// single import surface for the tests: public API plus the runner/matrix
// internals used to drive the CLI directly for cross-checks
export * from "../src/index";
export { payloadBytes } from "../src/matrix";
export { runCli } from "../src/runner";
