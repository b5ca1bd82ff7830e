#pragma once

#include <string_view>

// Copies of the files under data/, compiled into the library so every
// component works without a data directory on disk.
namespace phishpond::embedded {

std::string_view suffixes_txt();
std::string_view lexicon_txt();
std::string_view tips_txt();
std::string_view corpus_jsonl();
std::string_view sus_items_txt();
std::string_view pretest_key_jsonl();
std::string_view posttest_key_jsonl();

}  // namespace phishpond::embedded
