// HTTP server for a state directory.

#include <CLI11.hpp>
#include <httplib.h>

#include <cstdlib>
#include <iostream>

#include "ukg/service.hpp"

int main(int argc, char** argv) {
  std::string state = "./ukg-state";
  std::string host = "127.0.0.1";
  int port = 8080;

  CLI::App app{"Serve a knowledge state over HTTP/JSON."};
  app.add_option("--state", state, "state directory (UKG_STATE overrides)");
  app.add_option("--host", host, "bind address");
  app.add_option("--port", port, "port")->check(CLI::Range(0, 65535));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  if (const char* env = std::getenv("UKG_STATE"); env && *env) state = env;

  try {
    ukg::ApiService service(state);
    httplib::Server server;
    service.bind(server);
    std::cerr << "serving " << state << " on http://" << host << ":" << port << "\n";
    if (!server.listen(host, port)) {
      std::cerr << "ukg-serve: cannot listen on " << host << ":" << port << "\n";
      return 2;
    }
  } catch (const ukg::Error& e) {
    std::cerr << "ukg-serve: " << e.what() << "\n";
    return e.code() == ukg::ErrorCode::usage ? 1 : 2;
  }
  return 0;
}
