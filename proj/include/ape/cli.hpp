#pragma once

namespace ape {

// Entry point of the `ape` executable. Returns 0 on success, 1 on input
// errors (bad flags, unreadable or invalid inputs), 2 on internal errors.
int run(int argc, char **argv);

}  // namespace ape
