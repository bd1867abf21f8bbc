#pragma once

#include "symdx/triage.hpp"

#include <string>

namespace httplib {
class Server;
}

namespace symdx::triage {

/// Routes /api/v1/* and /healthz to the service. The service must outlive the server.
void register_routes(httplib::Server& server, const TriageService& service);

/// Blocks serving requests until the process is stopped.
void serve(const TriageService& service, const std::string& addr, int port);

} // namespace symdx::triage
