// Copyright 2026 The IEFF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IEFF_COMMAND_QUEUE_H_
#define IEFF_COMMAND_QUEUE_H_

#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <thread>
#include <type_traits>

namespace ieff {

// FIFO of closures executed by one dedicated writer thread. Every mutation of
// a service's simulation goes through here, which makes the writer the only
// thread that ever touches it.
class CommandQueue {
 public:
  CommandQueue();
  // Runs whatever is still queued, then joins the writer.
  ~CommandQueue();

  CommandQueue(const CommandQueue&) = delete;
  CommandQueue& operator=(const CommandQueue&) = delete;

  // Exceptions thrown by `fn` surface from the returned future.
  template <typename Fn>
  std::future<std::invoke_result_t<Fn>> submit(Fn fn) {
    using Result = std::invoke_result_t<Fn>;
    auto task = std::make_shared<std::packaged_task<Result()>>(std::move(fn));
    std::future<Result> result = task->get_future();
    push([task] { (*task)(); });
    return result;
  }

  // True when called from the writer thread itself.
  bool on_writer() const { return std::this_thread::get_id() == worker_.get_id(); }

 private:
  void push(std::function<void()> job);
  void run();

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> jobs_;
  bool stopping_ = false;
  std::thread worker_;
};

}  // namespace ieff

#endif  // IEFF_COMMAND_QUEUE_H_
