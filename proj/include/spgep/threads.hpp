#pragma once

namespace spgep::threads {

// Effective worker count for all parallel regions. Defaults to the OpenMP
// maximum; the SPARSE_GEP_THREADS environment variable (read once) caps it.
int count();

// Test hook: override the count (0 restores the environment-derived value).
void set_count_for_testing(int n);

}  // namespace spgep::threads
