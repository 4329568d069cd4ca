#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mfwind::core {

/// Runs body(i) for i in [0, count) on up to `jobs` threads. Each index is
/// processed exactly once; callers write results into per-index slots, so the
/// outcome does not depend on scheduling. The first exception thrown by any
/// body is rethrown after all workers join.
template <typename Body>
void parallel_for(std::size_t count, std::size_t jobs, Body&& body) {
	jobs = std::max<std::size_t>(1, std::min(jobs, count));
	if (jobs <= 1) {
		for (std::size_t i = 0; i < count; ++i) {
			body(i);
		}
		return;
	}
	std::atomic<std::size_t> next{0};
	std::exception_ptr failure;
	std::mutex failure_mutex;
	auto worker = [&] {
		for (;;) {
			const std::size_t i = next.fetch_add(1);
			if (i >= count) {
				return;
			}
			try {
				body(i);
			} catch (...) {
				std::lock_guard lock(failure_mutex);
				if (!failure) {
					failure = std::current_exception();
				}
			}
		}
	};
	std::vector<std::jthread> threads;
	threads.reserve(jobs);
	for (std::size_t t = 0; t < jobs; ++t) {
		threads.emplace_back(worker);
	}
	threads.clear();
	if (failure) {
		std::rethrow_exception(failure);
	}
}

}  // namespace mfwind::core
