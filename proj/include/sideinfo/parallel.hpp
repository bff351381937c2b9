#pragma once

namespace sideinfo {

/// Number of OpenMP workers used by the parallel kernels (1 without OpenMP).
int worker_count();

/// Sets the worker count for subsequent parallel regions; n <= 0 restores the default.
void set_worker_count(int n);

}  // namespace sideinfo
