export * from "./types";
export * from "./state";
export * from "./requests";
export * from "./scales";
export * from "./views";
export * from "./api";
