import { mount } from "./app.js";
import { API_BASE } from "./config.js";

mount(document.getElementById("app")!, API_BASE);
