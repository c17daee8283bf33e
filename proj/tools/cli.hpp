#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace benignlab {

// `benignlab run|sweep|check ...`; returns the process exit code.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace benignlab
