#pragma once

#include "patchsim/baselines.hpp"
#include "patchsim/config.hpp"
#include "patchsim/corpus.hpp"
#include "patchsim/distance.hpp"
#include "patchsim/errors.hpp"
#include "patchsim/evaluation.hpp"
#include "patchsim/generator.hpp"
#include "patchsim/minilang/align.hpp"
#include "patchsim/minilang/interpreter.hpp"
#include "patchsim/minilang/parser.hpp"
#include "patchsim/minilang/printer.hpp"
#include "patchsim/patch_classifier.hpp"
#include "patchsim/pipeline.hpp"
#include "patchsim/test_classifier.hpp"
#include "patchsim/trace.hpp"
#include "patchsim/trace_io.hpp"
